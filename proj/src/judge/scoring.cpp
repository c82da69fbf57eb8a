#include "eftcot/judge/scoring.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <tuple>

#include "eftcot/core/unicode.hpp"

namespace eftcot::judge {

std::string_view to_string(JudgeMode m) { return m == JudgeMode::Comparative ? "comparative" : "absolute"; }

JudgeMode parse_judge_mode(std::string_view s) {
    if (s == "comparative") return JudgeMode::Comparative;
    if (s == "absolute") return JudgeMode::Absolute;
    throw ConfigError("judge mode must be 'comparative' or 'absolute', got '" + std::string(s) + "'");
}

std::string render_rubric_prompt(const BlindedItem& item, const Rubric& rubric, const std::string& case_text) {
    std::string p;
    const bool single = item.presentation.size() == 1;
    p += "You are an experienced psychological counselor reviewing anonymous replies to a help-seeking post. ";
    p += single ? "Score the reply on one dimension using the rubric below.\n"
                : "Score each reply on its own merits on one dimension using the rubric below. The order of the "
                  "replies carries no meaning.\n";
    p += "\nDimension: " + std::string(display_name(rubric.dimension)) + "\n";
    p += "Definition: " + rubric.definition + "\n";
    p += "Scoring criteria:\n";
    for (const auto& a : rubric.anchors) p += std::to_string(a.score) + " (" + a.label + "): " + a.text + "\n";
    p += "\nHelp-seeking post:\n" + case_text + "\n";
    for (const auto& slot : item.presentation) p += "\n" + slot.label + ":\n" + slot.text + "\n";
    p += "\nReply with one line per response in the form \"<letter>: <score>\", where <score> is an integer from 1 "
         "to 5. Example:\n";
    for (const auto& slot : item.presentation) p += slot.letter + ": 3\n";
    return p;
}

std::map<std::string, int> parse_judge_score(std::string_view reply, const std::vector<std::string>& slots) {
    static const std::regex pattern(R"re((?:^|[^A-Za-z0-9])(?:Response\s+)?"?([A-Z])"?\s*(?::|=|：)\s*(-?\d+))re");
    std::map<std::string, long long> last;
    const std::string s(reply);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), pattern); it != std::sregex_iterator(); ++it) {
        const std::string digits = (*it)[2].str();
        last[(*it)[1].str()] = digits.size() > 6 ? 999999 : std::stoll(digits);
    }
    std::map<std::string, int> out;
    for (const auto& slot : slots) {
        auto it = last.find(slot);
        if (it == last.end()) throw JudgeParseError("no score for slot " + slot);
        if (it->second < 1 || it->second > 5) {
            throw JudgeParseError("score " + std::to_string(it->second) + " for slot " + slot + " is outside 1..5");
        }
        out.emplace(slot, static_cast<int>(it->second));
    }
    return out;
}

void ScoreSheet::validate() const {
    if (scores.empty()) throw Error("score sheet for " + case_id + " has no scores");
    for (const auto& [system, score] : scores) {
        if (score < 1 || score > 5) throw Error("score sheet for " + case_id + ": score outside 1..5 for " + system);
    }
}

ordered_json to_json(const ScoreSheet& s) {
    ordered_json j;
    j["case_id"] = s.case_id;
    j["judge_id"] = s.judge_id;
    j["dimension"] = std::string(to_string(s.dimension));
    j["scores"] = ordered_json::object();
    for (const auto& [system, score] : s.scores) j["scores"][system] = score;
    return j;
}

ScoreSheet score_sheet_from_json(const json& j) {
    ScoreSheet s;
    try {
        s.case_id = j.at("case_id").get<std::string>();
        s.judge_id = j.at("judge_id").get<std::string>();
        s.dimension = parse_dimension(j.at("dimension").get<std::string>());
        for (const auto& [system, score] : j.at("scores").items()) s.scores[system] = score.get<int>();
    } catch (const json::exception& e) {
        throw FormatError("score sheet", e.what());
    }
    s.validate();
    return s;
}

std::vector<ScoreSheet> load_score_sheets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<ScoreSheet> out;
    std::string line;
    while (std::getline(in, line)) {
        if (text::is_blank(line)) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw IoError(path.string() + ": malformed score sheet line");
        out.push_back(score_sheet_from_json(j));
    }
    return out;
}

namespace {

// (dimension, system, case) -> mean over judges.
std::map<std::tuple<Dimension, std::string, std::string>, double> judge_means(const std::vector<ScoreSheet>& sheets) {
    std::map<std::tuple<Dimension, std::string, std::string>, std::pair<double, int>> acc;
    for (const auto& s : sheets) {
        for (const auto& [system, score] : s.scores) {
            auto& [sum, n] = acc[{s.dimension, system, s.case_id}];
            sum += score;
            ++n;
        }
    }
    std::map<std::tuple<Dimension, std::string, std::string>, double> out;
    for (const auto& [k, v] : acc) out.emplace(k, v.first / v.second);
    return out;
}

} // namespace

PanelMeans aggregate_panel(const std::vector<ScoreSheet>& sheets) {
    std::map<std::pair<Dimension, std::string>, std::pair<double, int>> acc;
    for (const auto& [k, mean] : judge_means(sheets)) {
        auto& [sum, n] = acc[{std::get<0>(k), std::get<1>(k)}];
        sum += mean;
        ++n;
    }
    PanelMeans out;
    for (const auto& [k, v] : acc) out[k.first][k.second] = v.first / v.second;
    return out;
}

double round2(double x) {
    const double scaled = x * 100.0;
    return std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::fabs(scaled))) / 100.0;
}

CaseScores case_scores(const std::vector<ScoreSheet>& sheets, const std::vector<Dimension>& dimensions) {
    const std::set<Dimension> wanted(dimensions.begin(), dimensions.end());
    std::map<std::pair<std::string, std::string>, std::pair<double, int>> acc;
    for (const auto& [k, mean] : judge_means(sheets)) {
        if (!wanted.count(std::get<0>(k))) continue;
        auto& [sum, n] = acc[{std::get<1>(k), std::get<2>(k)}];
        sum += mean;
        ++n;
    }
    CaseScores out;
    for (const auto& [k, v] : acc) out[k.first][k.second] = v.first / v.second;
    return out;
}

} // namespace eftcot::judge

#include "eftcot/judge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace eftcot::judge {

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", round2(v));
    return buf;
}

std::string format_p(const StatTestResult& r) {
    char buf[32];
    if (r.p_value < 0.001) std::snprintf(buf, sizeof buf, "<0.001");
    else std::snprintf(buf, sizeof buf, "%.3f", r.p_value);
    return std::string(buf) + (r.significant ? "*" : "");
}

std::optional<double> mean_of(const PanelMeans& means, Dimension d, const std::string& system) {
    auto dim = means.find(d);
    if (dim == means.end()) return std::nullopt;
    auto it = dim->second.find(system);
    if (it == dim->second.end()) return std::nullopt;
    return it->second;
}

std::optional<double> average_of(const PanelMeans& means, const std::vector<Dimension>& dims,
                                 const std::string& system) {
    double sum = 0.0;
    for (Dimension d : dims) {
        auto m = mean_of(means, d, system);
        if (!m) return std::nullopt;
        sum += *m;
    }
    return dims.empty() ? std::nullopt : std::optional<double>(sum / static_cast<double>(dims.size()));
}

std::string cell(const std::optional<double>& v) { return v ? fixed2(*v) : std::string("—"); }

ordered_json matrix_json(const SignificanceMatrix& m) {
    ordered_json j;
    j["systems"] = m.systems;
    ordered_json rows = ordered_json::array();
    for (const auto& row : m.cells) {
        ordered_json r = ordered_json::array();
        for (const auto& c : row) {
            if (!c) {
                r.push_back(nullptr);
                continue;
            }
            r.push_back(ordered_json{{"W", c->statistic},
                                     {"n_effective", c->n_effective},
                                     {"p_value", c->p_value},
                                     {"significant", c->significant},
                                     {"method", std::string(to_string(c->method))}});
        }
        rows.push_back(r);
    }
    j["row_beats_column"] = rows;
    return j;
}

} // namespace

SignificanceMatrix significance_matrix(const CaseScores& scores, const std::vector<std::string>& systems,
                                       double alpha, std::size_t exact_cutoff) {
    SignificanceMatrix m;
    m.systems = systems;
    m.cells.assign(systems.size(), std::vector<std::optional<StatTestResult>>(systems.size()));
    for (std::size_t r = 0; r < systems.size(); ++r) {
        for (std::size_t c = 0; c < systems.size(); ++c) {
            if (r == c) continue;
            auto a = scores.find(systems[r]);
            auto b = scores.find(systems[c]);
            if (a == scores.end() || b == scores.end()) continue;
            std::vector<double> xs, ys;
            for (const auto& [case_id, score] : a->second) {
                auto other = b->second.find(case_id);
                if (other == b->second.end()) continue;
                xs.push_back(score);
                ys.push_back(other->second);
            }
            if (xs.empty()) continue;
            try {
                m.cells[r][c] = wilcoxon_one_sided(xs, ys, alpha, exact_cutoff);
            } catch (const DegenerateError&) {
            }
        }
    }
    return m;
}

std::string render_dimension_rows(const PanelMeans& means, const std::vector<Dimension>& dims,
                                  const std::vector<std::string>& systems) {
    std::ostringstream out;
    out << "| Metric |";
    for (const auto& s : systems) out << ' ' << s << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < systems.size(); ++i) out << "---|";
    out << '\n';
    for (Dimension d : dims) {
        out << "| " << display_name(d) << " |";
        for (const auto& s : systems) out << ' ' << cell(mean_of(means, d, s)) << " |";
        out << '\n';
    }
    out << "| Average |";
    for (const auto& s : systems) out << ' ' << cell(average_of(means, dims, s)) << " |";
    out << '\n';
    return out.str();
}

std::string render_system_rows(const PanelMeans& means, const std::vector<Dimension>& dims,
                               const std::vector<std::string>& systems) {
    std::ostringstream out;
    out << "| Model |";
    for (Dimension d : dims) out << ' ' << short_name(d) << " |";
    out << " Avg. |\n|---|";
    for (std::size_t i = 0; i <= dims.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& s : systems) {
        out << "| " << s << " |";
        for (Dimension d : dims) out << ' ' << cell(mean_of(means, d, s)) << " |";
        out << ' ' << cell(average_of(means, dims, s)) << " |\n";
    }
    return out.str();
}

std::string render_significance(const SignificanceMatrix& m) {
    std::ostringstream out;
    out << "| p (row > column) |";
    for (const auto& s : m.systems) out << ' ' << s << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < m.systems.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t r = 0; r < m.systems.size(); ++r) {
        out << "| " << m.systems[r] << " |";
        for (std::size_t c = 0; c < m.systems.size(); ++c) {
            if (r == c) out << " — |";
            else if (!m.cells[r][c]) out << " n/a |";
            else out << ' ' << format_p(*m.cells[r][c]) << " |";
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> systems_in(const std::vector<ScoreSheet>& sheets, const std::string& reference) {
    std::set<std::string> all;
    for (const auto& s : sheets) {
        for (const auto& [system, score] : s.scores) all.insert(system);
    }
    std::vector<std::string> out;
    if (all.count(reference)) out.push_back(reference);
    for (const auto& s : all) {
        if (s != reference) out.push_back(s);
    }
    return out;
}

ordered_json build_judge_report(const JudgeRun& run, const JudgeConfig& config, const ReportOptions& options) {
    const auto systems = systems_in(run.sheets, options.reference_system);
    const std::string reference = options.reference_system.empty() && !systems.empty() ? systems.front()
                                                                                        : options.reference_system;
    std::set<Dimension> present;
    for (const auto& s : run.sheets) present.insert(s.dimension);
    std::vector<Dimension> dims, eft, general;
    for (Dimension d : kAllDimensions) {
        if (!present.count(d)) continue;
        dims.push_back(d);
        if (std::find(kEftDimensions.begin(), kEftDimensions.end(), d) != kEftDimensions.end()) eft.push_back(d);
        else general.push_back(d);
    }

    const PanelMeans means = aggregate_panel(run.sheets);
    ordered_json j;
    j["mode"] = std::string(to_string(config.mode));
    j["seed"] = config.seed;
    j["panel"] = config.panel;
    j["systems"] = systems;
    j["reference_system"] = reference;
    std::set<std::string> cases;
    for (const auto& s : run.sheets) cases.insert(s.case_id);
    j["cases_scored"] = cases.size();
    j["sheet_count"] = run.sheets.size();

    ordered_json mj = ordered_json::object();
    for (Dimension d : dims) {
        ordered_json row = ordered_json::object();
        for (const auto& s : systems) {
            if (auto m = mean_of(means, d, s)) row[s] = ordered_json{{"mean", *m}, {"rounded", round2(*m)}};
        }
        mj[std::string(to_string(d))] = row;
    }
    j["means"] = mj;

    const CaseScores overall = case_scores(run.sheets, dims);
    ordered_json wins = ordered_json::object();
    if (overall.count(reference)) {
        for (const auto& other : systems) {
            if (other == reference || !overall.count(other)) continue;
            std::vector<Preference> prefs;
            for (const auto& [case_id, score] : overall.at(reference)) {
                auto it = overall.at(other).find(case_id);
                if (it != overall.at(other).end()) prefs.push_back(prefer(score, it->second));
            }
            const auto count = [&](Preference p) { return std::count(prefs.begin(), prefs.end(), p); };
            wins[other] = ordered_json{{"win_rate", win_rate(prefs, options.tie_mode)},
                                       {"wins", count(Preference::A)},
                                       {"ties", count(Preference::Tie)},
                                       {"losses", count(Preference::B)},
                                       {"cases", prefs.size()}};
        }
    }
    j["win_rates"] = ordered_json{{"reference", reference},
                                  {"tie_mode", options.tie_mode == TieMode::Half ? "half" : "exclude"},
                                  {"against", wins}};

    const SignificanceMatrix overall_matrix = significance_matrix(overall, systems, options.alpha, options.exact_cutoff);
    ordered_json sig;
    sig["alpha"] = options.alpha;
    sig["exact_cutoff"] = options.exact_cutoff;
    sig["zero_differences"] = "dropped";
    sig["overall"] = matrix_json(overall_matrix);
    ordered_json per_dim = ordered_json::object();
    for (Dimension d : dims) {
        per_dim[std::string(to_string(d))] = matrix_json(
            significance_matrix(case_scores(run.sheets, {d}), systems, options.alpha, options.exact_cutoff));
    }
    sig["per_dimension"] = per_dim;
    j["significance"] = sig;

    ordered_json gaps = ordered_json::array();
    for (const auto& g : run.gaps) {
        gaps.push_back(ordered_json{{"case_id", g.case_id},
                                    {"judge_id", g.judge_id},
                                    {"dimension", std::string(to_string(g.dimension))},
                                    {"reason", g.reason}});
    }
    j["gaps"] = gaps;

    ordered_json tables;
    if (!eft.empty()) tables["eft_dimensions"] = render_dimension_rows(means, eft, systems);
    if (!general.empty()) tables["counseling_dimensions"] = render_system_rows(means, general, systems);
    tables["significance"] = render_significance(overall_matrix);
    j["tables"] = tables;
    return j;
}

} // namespace eftcot::judge

#include "eftcot/metrics/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "eftcot/core/parallel.hpp"
#include "eftcot/core/unicode.hpp"

namespace eftcot::metrics {

std::vector<EvalPair> load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<EvalPair> pairs;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::is_blank(line)) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw IoError(path.string() + ":" + std::to_string(number) + ": not a JSON object");
        }
        EvalPair p;
        try {
            p.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : std::to_string(number);
            p.candidate = j.at("candidate").get<std::string>();
            p.reference = j.at("reference").get<std::string>();
        } catch (const json::exception&) {
            throw IoError(path.string() + ":" + std::to_string(number) + ": needs string candidate and reference");
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

namespace {

struct PairScores {
    double meteor = 0, bleu1 = 0, bleu2 = 0, bleu3 = 0, rouge_l = 0, bert = 0;
};

} // namespace

MetricReport evaluate_corpus(const std::vector<EvalPair>& pairs, EmbeddingProvider* provider,
                             const MetricOptions& options) {
    if (pairs.empty()) throw Error("evaluate_corpus needs at least one pair");
    std::vector<PairScores> scores(pairs.size());
    std::vector<TokenSeq> candidates(pairs.size());
    parallel_for(pairs.size(), options.workers, [&](std::size_t i) {
        const TokenSeq c = tokenize(pairs[i].candidate, options.tokenize);
        const TokenSeq r = tokenize(pairs[i].reference, options.tokenize);
        PairScores& s = scores[i];
        s.meteor = meteor(c, r);
        s.bleu1 = bleu_n(c, r, 1);
        s.bleu2 = bleu_n(c, r, 2);
        s.bleu3 = bleu_n(c, r, 3);
        s.rouge_l = rouge_l(c, r);
        if (provider != nullptr) {
            try {
                s.bert = options.bert_mode == BertScoreMode::Greedy
                             ? bert_score(c, r, *provider)
                             : bert_score_sentence(pairs[i].candidate, pairs[i].reference, *provider);
            } catch (const EmptyInputError&) {
                s.bert = 0.0;
            }
        }
        candidates[i] = c;
    });

    MetricReport report;
    double bert = 0.0;
    for (const auto& s : scores) {
        report.meteor += s.meteor;
        report.bleu1 += s.bleu1;
        report.bleu2 += s.bleu2;
        report.bleu3 += s.bleu3;
        report.rouge_l += s.rouge_l;
        bert += s.bert;
    }
    const auto n = static_cast<double>(pairs.size());
    report.meteor /= n;
    report.bleu1 /= n;
    report.bleu2 /= n;
    report.bleu3 /= n;
    report.rouge_l /= n;
    if (provider != nullptr) report.bert_score = bert / n;
    report.distinct1 = distinct_n(candidates, 1);
    report.distinct2 = distinct_n(candidates, 2);
    report.distinct3 = distinct_n(candidates, 3);
    report.sample_count = pairs.size();
    return report;
}

ordered_json report_to_json(const MetricReport& report, const MetricOptions& options,
                            const std::string& embedder_name) {
    ordered_json j;
    j["sample_count"] = report.sample_count;
    j["meteor"] = report.meteor;
    j["bleu1"] = report.bleu1;
    j["bleu2"] = report.bleu2;
    j["bleu3"] = report.bleu3;
    j["rouge_l"] = report.rouge_l;
    j["distinct1"] = report.distinct1;
    j["distinct2"] = report.distinct2;
    j["distinct3"] = report.distinct3;
    j["bert_score"] = report.bert_score ? ordered_json(*report.bert_score) : ordered_json(nullptr);
    ordered_json meta;
    meta["tokenization"] = options.tokenize == TokenizeMode::Character ? "character" : "whitespace";
    meta["rouge_beta"] = 1;
    meta["meteor"] = "exact match only, alpha 0.9, gamma 0.5, beta 3";
    meta["bert_score"] = ordered_json{
        {"mode", options.bert_mode == BertScoreMode::Greedy ? "greedy" : "sentence-cosine"},
        {"idf_weighting", false},
        {"baseline_rescaling", false},
        {"embedder", embedder_name.empty() ? ordered_json(nullptr) : ordered_json(embedder_name)},
    };
    j["metadata"] = meta;
    return j;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
    return buf;
}

} // namespace

std::string render_metric_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
    std::ostringstream out;
    out << "| System | METEOR | B-1 | B-2 | B-3 | R-L | D-1 | D-2 | D-3 | BERTScore |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& [name, r] : rows) {
        out << "| " << name << " | " << pct(r.meteor) << " | " << pct(r.bleu1) << " | " << pct(r.bleu2) << " | "
            << pct(r.bleu3) << " | " << pct(r.rouge_l) << " | " << pct(r.distinct1) << " | " << pct(r.distinct2)
            << " | " << pct(r.distinct3) << " | " << (r.bert_score ? pct(*r.bert_score) : std::string("—"))
            << " |\n";
    }
    return out.str();
}

} // namespace eftcot::metrics

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eftcot/core/json_io.hpp"
#include "eftcot/metrics/embedding.hpp"

namespace eftcot::metrics {

struct EvalPair {
    std::string id;
    std::string candidate;
    std::string reference;
};

/// Values in [0, 1]; scaled by 100 only when rendered.
struct MetricReport {
    double meteor = 0, bleu1 = 0, bleu2 = 0, bleu3 = 0, rouge_l = 0;
    double distinct1 = 0, distinct2 = 0, distinct3 = 0;
    std::optional<double> bert_score;
    std::size_t sample_count = 0;
};

struct MetricOptions {
    TokenizeMode tokenize = TokenizeMode::Character;
    BertScoreMode bert_mode = BertScoreMode::Greedy;
    int workers = 1;
};

/// Reads JSONL {id, candidate, reference}.
std::vector<EvalPair> load_pairs(const std::filesystem::path& path);

/// Sentence metrics averaged over pairs; Distinct over all candidates.
/// BERTScore is absent when `provider` is null.
MetricReport evaluate_corpus(const std::vector<EvalPair>& pairs, EmbeddingProvider* provider = nullptr,
                             const MetricOptions& options = {});

ordered_json report_to_json(const MetricReport& report, const MetricOptions& options,
                            const std::string& embedder_name = "");

/// Markdown table, one row per system: METEOR, B-1..3, R-L, D-1..3, BERTScore (x100, 2 decimals).
std::string render_metric_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

} // namespace eftcot::metrics

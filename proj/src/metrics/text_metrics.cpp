#include "eftcot/metrics/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "eftcot/core/unicode.hpp"

namespace eftcot::metrics {

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (const auto& t : tokens_) {
        if (t.empty()) throw Error("TokenSeq cannot hold an empty token");
    }
}

TokenSeq tokenize(std::string_view text, TokenizeMode mode) {
    std::vector<std::string> out;
    std::string current;
    for (char32_t cp : text::decode_utf8(text)) {
        if (text::is_space(cp)) {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
            continue;
        }
        text::append_utf8(current, cp);
        if (mode == TokenizeMode::Character) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return TokenSeq(std::move(out));
}

namespace {

std::string ngram_key(const TokenSeq& s, std::size_t start, std::size_t n) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
        if (k) key.push_back('\x1f');
        key += s[start + k];
    }
    return key;
}

std::unordered_map<std::string, std::size_t> ngram_counts(const TokenSeq& s, std::size_t n) {
    std::unordered_map<std::string, std::size_t> counts;
    if (n == 0 || s.size() < n) return counts;
    for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[ngram_key(s, i, n)];
    return counts;
}

} // namespace

NgramMatch ngram_match(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n) {
    NgramMatch m;
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    for (const auto& [gram, count] : cand) {
        m.total += count;
        auto it = ref.find(gram);
        if (it == ref.end()) continue;
        m.unclipped += count;
        m.clipped += std::min(count, it->second);
    }
    return m;
}

double bleu_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n) {
    if (n == 0) throw Error("bleu_n requires n >= 1");
    if (candidate.size() < n || reference.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const NgramMatch m = ngram_match(candidate, reference, i);
        if (m.clipped == 0) return 0.0;
        log_sum += std::log(static_cast<double>(m.clipped) / static_cast<double>(m.total));
    }
    const double c = static_cast<double>(candidate.size());
    const double r = static_cast<double>(reference.size());
    const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    return bp * std::exp(log_sum / static_cast<double>(n));
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const auto l = static_cast<double>(lcs_length(candidate, reference));
    if (l == 0.0) return 0.0;
    const double p = l / static_cast<double>(candidate.size());
    const double r = l / static_cast<double>(reference.size());
    return 2.0 * p * r / (p + r);
}

namespace {

struct Run {
    std::size_t i, j, len;
    bool operator<(const Run& o) const {
        if (len != o.len) return len < o.len;
        if (i != o.i) return i > o.i;
        return j > o.j;
    }
};

std::size_t count_chunks(std::vector<std::pair<std::size_t, std::size_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    std::size_t chunks = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (k == 0 || pairs[k].first != pairs[k - 1].first + 1 || pairs[k].second != pairs[k - 1].second + 1) {
            ++chunks;
        }
    }
    return chunks;
}

// Longest-segment-first alignment. Reaches the maximum match count because
// every unused equal pair remains a candidate run until consumed.
std::size_t greedy_chunks(const std::vector<int>& c, const std::vector<int>& r, std::size_t& matches) {
    std::priority_queue<Run> heap;
    for (std::size_t d = 0; d < c.size() + r.size(); ++d) {
        // Diagonal runs with i - j constant.
        std::size_t i = d < r.size() ? 0 : d - r.size() + 1;
        std::size_t j = d < r.size() ? r.size() - 1 - d : 0;
        std::size_t start_i = 0, start_j = 0, len = 0;
        for (; i < c.size() && j < r.size(); ++i, ++j) {
            if (c[i] == r[j]) {
                if (len == 0) start_i = i, start_j = j;
                ++len;
            } else if (len) {
                heap.push({start_i, start_j, len});
                len = 0;
            }
        }
        if (len) heap.push({start_i, start_j, len});
    }
    std::vector<bool> used_c(c.size(), false), used_r(r.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    while (!heap.empty()) {
        const Run run = heap.top();
        heap.pop();
        bool clean = true;
        for (std::size_t k = 0; k < run.len && clean; ++k) clean = !used_c[run.i + k] && !used_r[run.j + k];
        if (clean) {
            for (std::size_t k = 0; k < run.len; ++k) {
                used_c[run.i + k] = used_r[run.j + k] = true;
                pairs.emplace_back(run.i + k, run.j + k);
            }
            continue;
        }
        std::size_t len = 0;
        for (std::size_t k = 0; k <= run.len; ++k) {
            if (k < run.len && !used_c[run.i + k] && !used_r[run.j + k]) {
                ++len;
            } else if (len) {
                heap.push({run.i + k - len, run.j + k - len, len});
                len = 0;
            }
        }
    }
    matches = pairs.size();
    return count_chunks(std::move(pairs));
}

class ChunkSearch {
public:
    ChunkSearch(const std::vector<int>& c, const std::vector<int>& r, std::size_t types, std::size_t best,
                std::size_t budget)
        : c_(c), r_(r), best_(best), budget_(budget), used_r_(r.size(), false), ref_pos_(types), need_(types, 0),
          remaining_(types, 0) {
        std::vector<std::size_t> ref_count(types, 0);
        for (std::size_t j = 0; j < r.size(); ++j) {
            ref_pos_[static_cast<std::size_t>(r[j])].push_back(j);
            ++ref_count[static_cast<std::size_t>(r[j])];
        }
        for (int t : c) ++remaining_[static_cast<std::size_t>(t)];
        for (std::size_t t = 0; t < types; ++t) need_[t] = std::min(remaining_[t], ref_count[t]);
    }

    std::size_t run(bool& exact) {
        visit(0, 0, npos, npos);
        exact = !exhausted_;
        return best_;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void visit(std::size_t i, std::size_t chunks, std::size_t last_c, std::size_t last_r) {
        if (exhausted_) return;
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return;
        }
        if (chunks >= best_) return;
        if (i == c_.size()) {
            best_ = chunks;
            return;
        }
        const auto t = static_cast<std::size_t>(c_[i]);
        --remaining_[t];
        if (need_[t] > 0) {
            const bool adjacent = last_c != npos && last_c + 1 == i;
            auto try_match = [&](std::size_t j) {
                const bool extends = adjacent && last_r + 1 == j;
                used_r_[j] = true;
                --need_[t];
                visit(i + 1, chunks + (extends ? 0 : 1), i, j);
                ++need_[t];
                used_r_[j] = false;
            };
            if (adjacent && last_r + 1 < used_r_.size() && !used_r_[last_r + 1] &&
                static_cast<std::size_t>(r_[last_r + 1]) == t) {
                try_match(last_r + 1);
            }
            for (std::size_t j : ref_pos_[t]) {
                if (used_r_[j] || (adjacent && j == last_r + 1)) continue;
                try_match(j);
            }
        }
        if (remaining_[t] >= need_[t]) visit(i + 1, chunks, last_c, last_r);
        ++remaining_[t];
    }

    const std::vector<int>& c_;
    const std::vector<int>& r_;
    std::size_t best_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    bool exhausted_ = false;
    std::vector<bool> used_r_;
    std::vector<std::vector<std::size_t>> ref_pos_;
    std::vector<std::size_t> need_;
    std::vector<std::size_t> remaining_;
};

} // namespace

MeteorAlignment meteor_alignment(const TokenSeq& candidate, const TokenSeq& reference, std::size_t node_budget) {
    std::unordered_map<std::string, int> ids;
    auto encode = [&](const TokenSeq& s) {
        std::vector<int> out;
        out.reserve(s.size());
        for (const auto& tok : s) out.push_back(ids.emplace(tok, static_cast<int>(ids.size())).first->second);
        return out;
    };
    const std::vector<int> c = encode(candidate);
    const std::vector<int> r = encode(reference);

    MeteorAlignment a;
    const std::size_t greedy = greedy_chunks(c, r, a.matches);
    a.chunks = greedy;
    if (a.matches == 0 || greedy <= 1) return a;

    ChunkSearch search(c, r, ids.size(), greedy, node_budget);
    a.chunks = search.run(a.exact);
    return a;
}

double meteor(const TokenSeq& candidate, const TokenSeq& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const MeteorAlignment a = meteor_alignment(candidate, reference);
    if (a.matches == 0) return 0.0;
    const auto m = static_cast<double>(a.matches);
    const double p = m / static_cast<double>(candidate.size());
    const double r = m / static_cast<double>(reference.size());
    const double fmean = 10.0 * p * r / (r + 9.0 * p);
    const double penalty = 0.5 * std::pow(static_cast<double>(a.chunks) / m, 3.0);
    return fmean * (1.0 - penalty);
}

double distinct_n(const std::vector<TokenSeq>& corpus, std::size_t n) {
    if (n == 0) throw Error("distinct_n requires n >= 1");
    std::unordered_set<std::string> unique;
    std::size_t total = 0;
    for (const auto& seq : corpus) {
        for (std::size_t i = 0; i + n <= seq.size(); ++i) {
            unique.insert(ngram_key(seq, i, n));
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(unique.size()) / static_cast<double>(total);
}

} // namespace eftcot::metrics

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "eftcot/core/error.hpp"

namespace eftcot::metrics {

enum class TokenizeMode { Character, Whitespace };

/// Ordered, non-empty tokens. Construction rejects empty tokens.
class TokenSeq {
public:
    TokenSeq() = default;
    explicit TokenSeq(std::vector<std::string> tokens);
    TokenSeq(std::initializer_list<std::string> tokens) : TokenSeq(std::vector<std::string>(tokens)) {}

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }
    const std::string& operator[](std::size_t i) const { return tokens_[i]; }
    auto begin() const noexcept { return tokens_.begin(); }
    auto end() const noexcept { return tokens_.end(); }

    bool operator==(const TokenSeq&) const = default;

private:
    std::vector<std::string> tokens_;
};

/// Character: one token per non-whitespace code point. Whitespace: split on runs.
TokenSeq tokenize(std::string_view text, TokenizeMode mode = TokenizeMode::Character);

struct NgramMatch {
    std::size_t clipped = 0;    // matches capped by reference counts
    std::size_t unclipped = 0;  // candidate n-grams present in the reference at all
    std::size_t total = 0;      // candidate n-gram count
};

NgramMatch ngram_match(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n);

/// Single-reference BLEU with uniform weights over 1..n and brevity penalty.
double bleu_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n);

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);
/// LCS F1 (beta = 1).
double rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

struct MeteorAlignment {
    std::size_t matches = 0;
    std::size_t chunks = 0;
    /// False when the chunk search ran out of budget and `chunks` is an upper bound.
    bool exact = true;
};

/// Maximum exact-match alignment with the fewest chunks found within
/// `node_budget` search nodes.
MeteorAlignment meteor_alignment(const TokenSeq& candidate, const TokenSeq& reference,
                                 std::size_t node_budget = 200000);

/// Exact-match METEOR: Fmean = 10PR/(R+9P), penalty 0.5 (chunks/m)^3.
double meteor(const TokenSeq& candidate, const TokenSeq& reference);

/// Corpus-level distinct n-grams over total n-grams.
double distinct_n(const std::vector<TokenSeq>& corpus, std::size_t n);

} // namespace eftcot::metrics

#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "eftcot/gateway/types.hpp"
#include "eftcot/metrics/text_metrics.hpp"

namespace eftcot::metrics {

using Vector = std::vector<double>;

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// One unit-normalized vector per token.
    virtual std::vector<Vector> embed_tokens(const TokenSeq& tokens) = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic hash-seeded unit vectors. Equal tokens embed identically;
/// distinct tokens are nearly orthogonal at higher dimensions.
class ToyHashProvider : public EmbeddingProvider {
public:
    explicit ToyHashProvider(std::size_t dimension = 64, std::uint64_t seed = 0);
    std::vector<Vector> embed_tokens(const TokenSeq& tokens) override;
    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "toy-hash"; }

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

/// OpenAI-style POST {base_url}/embeddings client with a per-token cache.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(gateway::ModelEndpoint endpoint, std::size_t batch_size = 64);
    std::vector<Vector> embed_tokens(const TokenSeq& tokens) override;
    std::size_t dimension() const override;
    std::string name() const override { return endpoint_.model_name; }

private:
    std::vector<Vector> request(const std::vector<std::string>& inputs);

    gateway::ModelEndpoint endpoint_;
    std::size_t batch_size_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Vector> cache_;
    std::size_t dimension_ = 0;
};

Vector normalized(Vector v);
double cosine(const Vector& a, const Vector& b);

enum class BertScoreMode { Greedy, SentenceCosine };

/// Greedy-matching BERTScore F1 without IDF weighting or baseline rescaling,
/// clamped to [0, 1].
double bert_score(const TokenSeq& candidate, const TokenSeq& reference, EmbeddingProvider& provider);

/// Cosine of whole-text embeddings, clamped to [0, 1].
double bert_score_sentence(std::string_view candidate, std::string_view reference, EmbeddingProvider& provider);

} // namespace eftcot::metrics

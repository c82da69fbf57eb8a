#include "eftcot/metrics/embedding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/rng.hpp"
#include "eftcot/core/unicode.hpp"
#include "eftcot/gateway/http_transport.hpp"

namespace eftcot::metrics {

Vector normalized(Vector v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error("cannot normalize a zero vector");
    for (double& x : v) x /= norm;
    return v;
}

double cosine(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw Error("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

ToyHashProvider::ToyHashProvider(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
    if (dimension == 0) throw ConfigError("embedding dimension must be positive");
}

std::vector<Vector> ToyHashProvider::embed_tokens(const TokenSeq& tokens) {
    std::vector<Vector> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        SeededRng rng(derive_seed(seed_, tok));
        Vector v(dimension_);
        for (;;) {
            for (double& x : v) x = rng.unit() * 2.0 - 1.0;
            if (std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; })) break;
        }
        out.push_back(normalized(std::move(v)));
    }
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(gateway::ModelEndpoint endpoint, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(std::max<std::size_t>(1, batch_size)) {
    gateway::parse_base_url(endpoint_.base_url);
}

std::vector<Vector> HttpEmbeddingProvider::request(const std::vector<std::string>& inputs) {
    const auto url = gateway::parse_base_url(endpoint_.base_url);
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(std::chrono::seconds(endpoint_.timeout_s));
    httplib::Headers headers;
    if (!endpoint_.auth_env_var.empty()) {
        const char* key = std::getenv(endpoint_.auth_env_var.c_str());
        if (key == nullptr || *key == '\0') {
            throw gateway::AuthError("environment variable " + endpoint_.auth_env_var + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    ordered_json body;
    body["model"] = endpoint_.model_name;
    body["input"] = inputs;
    auto result = client.Post(url.path_prefix + "/embeddings", headers, dump_line(body), "application/json");
    if (!result) {
        throw gateway::TransportError("embedding endpoint '" + endpoint_.id + "': " + httplib::to_string(result.error()),
                                      true);
    }
    if (result->status != 200) {
        throw gateway::ProviderError("embedding endpoint '" + endpoint_.id + "' HTTP " +
                                         std::to_string(result->status),
                                     result->status);
    }
    const json j = json::parse(result->body, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || !j["data"].is_array() || j["data"].size() != inputs.size()) {
        throw gateway::ProviderError("embedding endpoint '" + endpoint_.id + "' returned a malformed body", 200);
    }
    std::vector<Vector> out(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const auto& item = j["data"][k];
        const std::size_t index = item.value("index", k);
        if (index >= inputs.size()) throw gateway::ProviderError("embedding index out of range", 200);
        out[index] = normalized(item.at("embedding").get<Vector>());
    }
    return out;
}

std::vector<Vector> HttpEmbeddingProvider::embed_tokens(const TokenSeq& tokens) {
    std::vector<std::string> missing;
    {
        std::scoped_lock lock(mutex_);
        for (const auto& tok : tokens) {
            if (!cache_.count(tok) && std::find(missing.begin(), missing.end(), tok) == missing.end()) {
                missing.push_back(tok);
            }
        }
    }
    for (std::size_t start = 0; start < missing.size(); start += batch_size_) {
        const std::vector<std::string> batch(missing.begin() + static_cast<std::ptrdiff_t>(start),
                                             missing.begin() + static_cast<std::ptrdiff_t>(
                                                                   std::min(missing.size(), start + batch_size_)));
        auto vectors = request(batch);
        std::scoped_lock lock(mutex_);
        for (std::size_t k = 0; k < batch.size(); ++k) {
            if (dimension_ == 0) dimension_ = vectors[k].size();
            if (vectors[k].size() != dimension_) throw gateway::ProviderError("embedding dimension changed", 200);
            cache_.emplace(batch[k], std::move(vectors[k]));
        }
    }
    std::scoped_lock lock(mutex_);
    std::vector<Vector> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) out.push_back(cache_.at(tok));
    return out;
}

std::size_t HttpEmbeddingProvider::dimension() const {
    std::scoped_lock lock(mutex_);
    return dimension_;
}

namespace {

std::vector<Vector> checked_embed(EmbeddingProvider& provider, const TokenSeq& tokens) {
    auto vectors = provider.embed_tokens(tokens);
    if (vectors.size() != tokens.size()) throw Error("embedding provider returned the wrong number of vectors");
    return vectors;
}

} // namespace

double bert_score(const TokenSeq& candidate, const TokenSeq& reference, EmbeddingProvider& provider) {
    if (candidate.empty() || reference.empty()) throw EmptyInputError("BERTScore needs non-empty token sequences");
    const auto c = checked_embed(provider, candidate);
    const auto r = checked_embed(provider, reference);
    std::vector<double> best_c(c.size(), -1.0), best_r(r.size(), -1.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            const double s = cosine(c[i], r[j]);
            best_c[i] = std::max(best_c[i], s);
            best_r[j] = std::max(best_r[j], s);
        }
    }
    double p = 0.0, rec = 0.0;
    for (double s : best_c) p += s;
    for (double s : best_r) rec += s;
    p /= static_cast<double>(c.size());
    rec /= static_cast<double>(r.size());
    if (p + rec <= 0.0) return 0.0;
    return std::clamp(2.0 * p * rec / (p + rec), 0.0, 1.0);
}

double bert_score_sentence(std::string_view candidate, std::string_view reference, EmbeddingProvider& provider) {
    const std::string c = text::trim(candidate);
    const std::string r = text::trim(reference);
    if (c.empty() || r.empty()) throw EmptyInputError("BERTScore needs non-empty texts");
    const auto v = checked_embed(provider, TokenSeq({c, r}));
    return std::clamp(cosine(v[0], v[1]), 0.0, 1.0);
}

} // namespace eftcot::metrics

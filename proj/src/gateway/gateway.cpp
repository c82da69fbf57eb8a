#include "eftcot/gateway/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "eftcot/core/unicode.hpp"

namespace eftcot::gateway {

RefusalDetector::RefusalDetector(std::vector<std::string> phrases) : phrases_(std::move(phrases)) {
    for (const auto& p : phrases_) {
        auto n = text::normalize_codepoints(p);
        if (!n.empty()) normalized_.push_back(std::move(n));
    }
}

bool RefusalDetector::matches(std::string_view text) const {
    if (normalized_.empty()) return false;
    const std::u32string hay = text::normalize_codepoints(text);
    for (const auto& p : normalized_) {
        if (hay.find(p) != std::u32string::npos) return true;
    }
    return false;
}

std::vector<std::string> default_refusal_phrases() {
    return {
        "I cannot help with that",
        "I can't help with that",
        "I can't assist with",
        "I cannot assist with",
        "I'm sorry, but I can't",
        "I am unable to provide",
        "I'm unable to help",
        "很抱歉，我无法",
        "我无法提供这方面",
        "我不能提供",
    };
}

void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

void Gateway::Limiter::acquire() {
    std::unique_lock lock(m_);
    cv_.wait(lock, [this] { return in_flight_ < cap_; });
    ++in_flight_;
}

void Gateway::Limiter::release() {
    {
        std::scoped_lock lock(m_);
        --in_flight_;
    }
    cv_.notify_one();
}

Gateway::Gateway(GatewayOptions options, std::shared_ptr<ChatTransport> network, std::shared_ptr<ChatTransport> stub,
                 Sleeper sleeper)
    : options_(std::move(options)),
      network_(std::move(network)),
      stub_(std::move(stub)),
      sleeper_(std::move(sleeper)),
      refusals_(options_.refusal_phrases),
      jitter_rng_(options_.jitter_seed) {
    if (options_.retry.max_retries < 0) throw ConfigError("retry.max_retries must be >= 0");
}

Gateway::Limiter& Gateway::limiter_for(const ModelEndpoint& endpoint) {
    std::scoped_lock lock(mutex_);
    auto& slot = limiters_[endpoint.id];
    if (!slot) slot = std::make_unique<Limiter>(endpoint.max_concurrency);
    return *slot;
}

ChatTransport& Gateway::transport_for(const ModelEndpoint& endpoint) {
    if (options_.stub_only || endpoint.kind == EndpointKind::Stub) {
        if (!stub_) throw ConfigError("endpoint '" + endpoint.id + "' needs a stub script but none is loaded");
        return *stub_;
    }
    if (!network_) throw ConfigError("no network transport configured for endpoint '" + endpoint.id + "'");
    return *network_;
}

std::chrono::milliseconds Gateway::backoff_delay(int retry) {
    const double base = static_cast<double>(options_.retry.base.count()) *
                        std::pow(options_.retry.factor, std::max(0, retry - 1));
    double u;
    {
        std::scoped_lock lock(mutex_);
        u = jitter_rng_.unit();
    }
    const double scaled = base * (1.0 + options_.retry.jitter * (2.0 * u - 1.0));
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(scaled)));
}

ChatResponse Gateway::complete_chat(const ModelEndpoint& endpoint, const ChatRequest& request) {
    ChatTransport& transport = transport_for(endpoint);
    const bool stubbed = options_.stub_only || endpoint.kind == EndpointKind::Stub;
    if (!stubbed && !endpoint.auth_env_var.empty()) {
        const char* key = std::getenv(endpoint.auth_env_var.c_str());
        if (key == nullptr || *key == '\0') {
            throw AuthError("environment variable " + endpoint.auth_env_var + " for endpoint '" + endpoint.id +
                            "' is not set");
        }
    }
    Limiter& limiter = limiter_for(endpoint);
    const int max_attempts = options_.retry.max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        ChatResponse response;
        limiter.acquire();
        try {
            response = transport.send(endpoint, request);
        } catch (const TransportError& e) {
            limiter.release();
            if (!e.transient() || attempt >= max_attempts) {
                throw TransportError(e.what(), e.transient(), e.status(), attempt);
            }
            sleeper_(backoff_delay(attempt));
            continue;
        } catch (...) {
            limiter.release();
            throw;
        }
        limiter.release();
        response.endpoint_id = endpoint.id;
        response.attempt_count = attempt;
        response.refusal = response.provider_refusal || refusals_.matches(response.text);
        if (text::is_blank(response.text) && !response.refusal) {
            throw ProviderError("endpoint '" + endpoint.id + "' returned an empty completion", 0);
        }
        return response;
    }
}

} // namespace eftcot::gateway

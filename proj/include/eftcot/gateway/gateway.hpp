#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "eftcot/core/rng.hpp"
#include "eftcot/gateway/types.hpp"

namespace eftcot::gateway {

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    /// One attempt. Throws TransportError / AuthError / ProviderError.
    virtual ChatResponse send(const ModelEndpoint& endpoint, const ChatRequest& request) = 0;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base{500};
    double factor = 2.0;
    double jitter = 0.2;
};

/// Case-insensitive phrase matcher for refusal detection.
class RefusalDetector {
public:
    RefusalDetector() = default;
    explicit RefusalDetector(std::vector<std::string> phrases);
    bool matches(std::string_view text) const;
    const std::vector<std::string>& phrases() const { return phrases_; }

private:
    std::vector<std::string> phrases_;
    std::vector<std::u32string> normalized_;
};

std::vector<std::string> default_refusal_phrases();

using Sleeper = std::function<void(std::chrono::milliseconds)>;

void real_sleep(std::chrono::milliseconds d);

struct GatewayOptions {
    RetryPolicy retry;
    std::vector<std::string> refusal_phrases = default_refusal_phrases();
    std::uint64_t jitter_seed = 0;
    /// Serve every endpoint from the stub transport.
    bool stub_only = false;
};

/// Uniform chat access with retry/backoff, refusal flagging and per-endpoint
/// concurrency caps. Thread-safe.
class Gateway {
public:
    Gateway(GatewayOptions options, std::shared_ptr<ChatTransport> network, std::shared_ptr<ChatTransport> stub,
            Sleeper sleeper = real_sleep);

    ChatResponse complete_chat(const ModelEndpoint& endpoint, const ChatRequest& request);

    /// Delay before retry number `retry` (1-based), jittered.
    std::chrono::milliseconds backoff_delay(int retry);

    const RefusalDetector& refusal_detector() const { return refusals_; }
    const GatewayOptions& options() const { return options_; }

private:
    class Limiter {
    public:
        explicit Limiter(int cap) : cap_(cap < 1 ? 1 : cap) {}
        void acquire();
        void release();

    private:
        std::mutex m_;
        std::condition_variable cv_;
        int cap_;
        int in_flight_ = 0;
    };

    Limiter& limiter_for(const ModelEndpoint& endpoint);
    ChatTransport& transport_for(const ModelEndpoint& endpoint);

    GatewayOptions options_;
    std::shared_ptr<ChatTransport> network_;
    std::shared_ptr<ChatTransport> stub_;
    Sleeper sleeper_;
    RefusalDetector refusals_;
    std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Limiter>> limiters_;
    SeededRng jitter_rng_;
};

} // namespace eftcot::gateway

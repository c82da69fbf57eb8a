#pragma once

#include <optional>
#include <string>

#include "eftcot/core/error.hpp"

namespace eftcot::gateway {

struct GenerationParams {
    double temperature = 0.01;
    double top_p = 0.7;
    int max_tokens = 1500;

    /// Throws ConfigError when a bound is violated.
    void validate() const;
    bool operator==(const GenerationParams&) const = default;
};

enum class EndpointKind {
    OpenAICompatible,
    Stub,
};

struct ModelEndpoint {
    std::string id;
    std::string base_url;
    std::string model_name;
    /// Name of the environment variable holding the API key. Keys never live in config.
    std::string auth_env_var;
    GenerationParams params;
    EndpointKind kind = EndpointKind::OpenAICompatible;
    int max_concurrency = 4;
    int timeout_s = 120;
};

struct ChatRequest {
    std::string system;
    std::string user;
    GenerationParams params;
    /// Routing hint for scripted stubs: "A1".."A8", "audit", "judge".
    std::string tag;
};

struct TokenCounts {
    int prompt = 0;
    int completion = 0;
};

struct ChatResponse {
    std::string text;
    std::string endpoint_id;
    double latency_ms = 0.0;
    std::optional<TokenCounts> tokens;
    /// Provider signalled a refusal or the text matched a refusal phrase.
    bool refusal = false;
    /// Set by the provider (e.g. finish_reason = content_filter).
    bool provider_refusal = false;
    int attempt_count = 1;
};

class GatewayError : public Error {
public:
    using Error::Error;
};

/// Transport failure. `transient` marks connection errors, 429 and 5xx.
class TransportError : public GatewayError {
public:
    TransportError(const std::string& what, bool transient, int status = 0, int attempts = 1)
        : GatewayError(what), transient_(transient), status_(status), attempts_(attempts) {}
    bool transient() const noexcept { return transient_; }
    int status() const noexcept { return status_; }
    int attempts() const noexcept { return attempts_; }

private:
    bool transient_;
    int status_;
    int attempts_;
};

class AuthError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// Non-retryable provider rejection (4xx other than 401/403/429).
class ProviderError : public GatewayError {
public:
    ProviderError(const std::string& what, int status) : GatewayError(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class RouteError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

} // namespace eftcot::gateway

#pragma once

#include <string>

#include "eftcot/gateway/gateway.hpp"

namespace eftcot::gateway {

struct ParsedUrl {
    std::string scheme_host_port;  // "https://api.example.com:443"
    std::string path_prefix;       // "/v1"
};

ParsedUrl parse_base_url(const std::string& base_url);

/// OpenAI-compatible chat-completions client: POST {base_url}/chat/completions
/// with system + user messages.
class HttpTransport : public ChatTransport {
public:
    HttpTransport() = default;
    ChatResponse send(const ModelEndpoint& endpoint, const ChatRequest& request) override;
};

/// Request body sent for a chat completion.
std::string chat_request_body(const ModelEndpoint& endpoint, const ChatRequest& request);

/// Extracts text, token counts and content-filter refusals from a completion body.
ChatResponse parse_chat_response(const std::string& body, const ModelEndpoint& endpoint);

} // namespace eftcot::gateway

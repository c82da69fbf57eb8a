#include "eftcot/gateway/http_transport.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>

#include "eftcot/core/json_io.hpp"

namespace eftcot::gateway {

ParsedUrl parse_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url '" + base_url + "' has no scheme");
    const auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.scheme_host_port = base_url.substr(0, path_start);
    out.path_prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    return out;
}

std::string chat_request_body(const ModelEndpoint& endpoint, const ChatRequest& request) {
    ordered_json body;
    body["model"] = endpoint.model_name;
    body["messages"] = ordered_json::array({
        ordered_json{{"role", "system"}, {"content", request.system}},
        ordered_json{{"role", "user"}, {"content", request.user}},
    });
    body["temperature"] = request.params.temperature;
    body["top_p"] = request.params.top_p;
    body["max_tokens"] = request.params.max_tokens;
    body["stream"] = false;
    return dump_line(body);
}

ChatResponse parse_chat_response(const std::string& body, const ModelEndpoint& endpoint) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ProviderError("endpoint '" + endpoint.id + "' returned a non-JSON body", 200);
    }
    auto choices = j.find("choices");
    if (choices == j.end() || !choices->is_array() || choices->empty()) {
        throw ProviderError("endpoint '" + endpoint.id + "' returned no choices", 200);
    }
    const auto& choice = (*choices)[0];
    ChatResponse r;
    r.endpoint_id = endpoint.id;
    if (auto msg = choice.find("message"); msg != choice.end() && msg->is_object()) {
        if (auto content = msg->find("content"); content != msg->end() && content->is_string()) {
            r.text = content->get<std::string>();
        }
        if (auto refusal = msg->find("refusal"); refusal != msg->end() && refusal->is_string() &&
                                                 !refusal->get<std::string>().empty()) {
            r.provider_refusal = true;
        }
    }
    if (auto reason = choice.find("finish_reason"); reason != choice.end() && reason->is_string()) {
        if (reason->get<std::string>() == "content_filter") r.provider_refusal = true;
    }
    if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
        TokenCounts t;
        t.prompt = usage->value("prompt_tokens", 0);
        t.completion = usage->value("completion_tokens", 0);
        r.tokens = t;
    }
    return r;
}

ChatResponse HttpTransport::send(const ModelEndpoint& endpoint, const ChatRequest& request) {
    const ParsedUrl url = parse_base_url(endpoint.base_url);
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(std::chrono::seconds(endpoint.timeout_s));
    client.set_write_timeout(std::chrono::seconds(30));

    httplib::Headers headers;
    if (!endpoint.auth_env_var.empty()) {
        if (const char* key = std::getenv(endpoint.auth_env_var.c_str()); key != nullptr && *key != '\0') {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }
    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(url.path_prefix + "/chat/completions", headers, chat_request_body(endpoint, request),
                              "application/json");
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    if (!result) {
        throw TransportError("endpoint '" + endpoint.id + "': " + httplib::to_string(result.error()), true);
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
        throw AuthError("endpoint '" + endpoint.id + "' rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429 || status >= 500) {
        throw TransportError("endpoint '" + endpoint.id + "' HTTP " + std::to_string(status), true, status);
    }
    if (status >= 400) {
        throw ProviderError("endpoint '" + endpoint.id + "' HTTP " + std::to_string(status) + ": " + result->body,
                            status);
    }
    ChatResponse r = parse_chat_response(result->body, endpoint);
    r.latency_ms = latency;
    return r;
}

} // namespace eftcot::gateway

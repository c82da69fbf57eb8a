#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "eftcot/gateway/gateway.hpp"

namespace eftcot::gateway {

enum class StubFailure {
    Transient,     // connection reset, retried
    RateLimited,   // 429, retried
    ServerError,   // 500, retried
    Auth,          // 401
    BadRequest,    // 400
};

/// One scripted reply. An entry matches when every present filter matches:
/// `stage` equals the request tag, `contains` occurs in system + user text,
/// `endpoint` equals the endpoint id. Non-repeat entries are consumed.
struct StubEntry {
    std::optional<std::string> stage;
    std::optional<std::string> contains;
    std::optional<std::string> endpoint;
    std::optional<std::string> reply;
    std::optional<StubFailure> error;
    bool repeat = false;
};

/// Parses a script line. The generic `match` key is read as a stage tag when it
/// looks like one (A1..A8, audit, judge) and as a substring otherwise.
StubEntry stub_entry_from_json(const std::string& line);
std::vector<StubEntry> load_stub_script(const std::filesystem::path& path);

/// Deterministic scripted transport. Replies may contain `{{slot_of:TEXT}}`,
/// replaced by the letter of the "Response X" block in the prompt that holds TEXT.
class StubTransport : public ChatTransport {
public:
    explicit StubTransport(std::vector<StubEntry> script);

    ChatResponse send(const ModelEndpoint& endpoint, const ChatRequest& request) override;

    std::size_t calls() const;
    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::vector<StubEntry> script_;
    std::vector<bool> consumed_;
    std::size_t calls_ = 0;
};

} // namespace eftcot::gateway

#include "eftcot/gateway/stub_transport.hpp"

#include <fstream>
#include <regex>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/unicode.hpp"

namespace eftcot::gateway {

namespace {

bool looks_like_tag(const std::string& s) {
    static const std::regex tag(R"(^(A[1-8]|audit|judge)$)", std::regex::icase);
    return std::regex_match(s, tag);
}

StubFailure parse_failure(const std::string& s) {
    if (s == "transient" || s == "timeout" || s == "connection") return StubFailure::Transient;
    if (s == "rate_limit" || s == "rate_limited" || s == "429") return StubFailure::RateLimited;
    if (s == "server" || s == "server_error" || s == "500") return StubFailure::ServerError;
    if (s == "auth" || s == "401") return StubFailure::Auth;
    if (s == "bad_request" || s == "provider" || s == "400") return StubFailure::BadRequest;
    throw ConfigError("unknown stub error class '" + s + "'");
}

[[noreturn]] void raise(StubFailure f, const std::string& where) {
    switch (f) {
    case StubFailure::Transient: throw TransportError("stub: connection reset (" + where + ")", true, 0);
    case StubFailure::RateLimited: throw TransportError("stub: HTTP 429 (" + where + ")", true, 429);
    case StubFailure::ServerError: throw TransportError("stub: HTTP 500 (" + where + ")", true, 500);
    case StubFailure::Auth: throw AuthError("stub: HTTP 401 (" + where + ")");
    case StubFailure::BadRequest: throw ProviderError("stub: HTTP 400 (" + where + ")", 400);
    }
    throw ProviderError("stub: unknown failure", 0);
}

std::string slot_letter_for(const std::string& haystack, const std::string& needle) {
    const auto pos = haystack.find(needle);
    if (pos == std::string::npos) return "?";
    static const std::string marker = "Response ";
    std::size_t at = haystack.rfind(marker, pos);
    while (at != std::string::npos) {
        const std::size_t letter = at + marker.size();
        if (letter < haystack.size() && haystack[letter] >= 'A' && haystack[letter] <= 'Z') {
            return std::string(1, haystack[letter]);
        }
        if (at == 0) break;
        at = haystack.rfind(marker, at - 1);
    }
    return "?";
}

std::string expand_reply(const std::string& reply, const std::string& haystack) {
    static const std::regex slot_of(R"(\{\{slot_of:([^}]*)\}\})");
    std::string out;
    auto begin = std::sregex_iterator(reply.begin(), reply.end(), slot_of);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        out.append(reply, last, static_cast<std::size_t>(it->position()) - last);
        out += slot_letter_for(haystack, (*it)[1].str());
        last = static_cast<std::size_t>(it->position() + it->length());
    }
    out.append(reply, last, std::string::npos);
    return out;
}

} // namespace

StubEntry stub_entry_from_json(const std::string& line) {
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("stub script line is not a JSON object");
    StubEntry e;
    auto str = [&j](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (it->is_string()) return it->get<std::string>();
        if (std::string(key) == "reply") return it->dump();  // object replies are sent as JSON text
        throw ConfigError(std::string("stub field '") + key + "' must be a string");
    };
    if (auto m = str("match")) {
        if (looks_like_tag(*m)) e.stage = *m;
        else e.contains = *m;
    }
    if (auto s = str("stage")) e.stage = *s;
    if (auto c = str("contains")) e.contains = *c;
    e.endpoint = str("endpoint");
    e.reply = str("reply");
    if (auto err = str("error")) e.error = parse_failure(*err);
    if (e.reply.has_value() == e.error.has_value()) {
        throw ConfigError("stub entry needs exactly one of 'reply' or 'error'");
    }
    if (auto it = j.find("repeat"); it != j.end() && it->is_boolean()) e.repeat = it->get<bool>();
    return e;
}

std::vector<StubEntry> load_stub_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open stub script " + path.string());
    std::vector<StubEntry> script;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::is_blank(line) || line.starts_with("//")) continue;
        try {
            script.push_back(stub_entry_from_json(line));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return script;
}

StubTransport::StubTransport(std::vector<StubEntry> script)
    : script_(std::move(script)), consumed_(script_.size(), false) {}

ChatResponse StubTransport::send(const ModelEndpoint& endpoint, const ChatRequest& request) {
    const std::string haystack = request.system + "\n" + request.user;
    const StubEntry* hit = nullptr;
    {
        std::scoped_lock lock(mutex_);
        ++calls_;
        for (std::size_t i = 0; i < script_.size(); ++i) {
            if (consumed_[i]) continue;
            const StubEntry& e = script_[i];
            if (e.stage && *e.stage != request.tag) continue;
            if (e.contains && haystack.find(*e.contains) == std::string::npos) continue;
            if (e.endpoint && *e.endpoint != endpoint.id) continue;
            if (!e.repeat) consumed_[i] = true;
            hit = &e;
            break;
        }
    }
    const std::string where = request.tag.empty() ? endpoint.id : request.tag;
    if (hit == nullptr) throw ProviderError("stub: no script entry matches request (" + where + ")", 404);
    if (hit->error) raise(*hit->error, where);
    ChatResponse r;
    r.text = expand_reply(*hit->reply, haystack);
    r.endpoint_id = endpoint.id;
    return r;
}

std::size_t StubTransport::calls() const {
    std::scoped_lock lock(mutex_);
    return calls_;
}

std::size_t StubTransport::remaining() const {
    std::scoped_lock lock(mutex_);
    std::size_t n = 0;
    for (std::size_t i = 0; i < script_.size(); ++i) n += consumed_[i] ? 0 : 1;
    return n;
}

} // namespace eftcot::gateway

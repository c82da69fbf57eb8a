#include "eftcot/core/stage_parser.hpp"

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/trace_validation.hpp"

namespace eftcot {

SchemaError::SchemaError(Stage stage, std::string field, const std::string& detail)
    : Error(std::string(to_string(stage)) + ": " + (field.empty() ? detail : "field '" + field + "': " + detail)),
      stage_(stage),
      field_(std::move(field)) {}

InvariantError::InvariantError(Stage stage, std::string rule, const std::string& detail)
    : Error(std::string(to_string(stage)) + ": " + rule + ": " + detail), stage_(stage), rule_(std::move(rule)) {}

std::optional<std::string> extract_first_object(std::string_view raw) {
    for (std::size_t start = raw.find('{'); start != std::string_view::npos; start = raw.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    std::string candidate(raw.substr(start, i - start + 1));
                    auto parsed = json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded() && parsed.is_object()) return candidate;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

void check_stage_invariants(const StageOutput& out, const ParseContext& ctx) {
    auto violations = stage_violations(out, ctx);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw InvariantError(v.stage, v.rule, v.detail);
    }
}

StageOutput parse_stage_output(Stage stage, std::string_view raw, const ParseContext& ctx) {
    auto object = extract_first_object(raw);
    if (!object) throw SchemaError(stage, "", "reply contains no JSON object");
    StageOutput out = stage_output_from_json(stage, json::parse(*object));
    check_stage_invariants(out, ctx);
    return out;
}

} // namespace eftcot

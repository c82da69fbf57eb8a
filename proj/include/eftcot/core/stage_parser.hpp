#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "eftcot/core/types.hpp"

namespace eftcot {

/// The reply (or a stored record) is not a usable object for the stage.
class SchemaError : public Error {
public:
    SchemaError(Stage stage, std::string field, const std::string& detail);
    Stage stage() const noexcept { return stage_; }
    const std::string& field() const noexcept { return field_; }

private:
    Stage stage_;
    std::string field_;
};

/// Parsed correctly but breaks a type invariant.
class InvariantError : public Error {
public:
    InvariantError(Stage stage, std::string rule, const std::string& detail);
    Stage stage() const noexcept { return stage_; }
    const std::string& rule() const noexcept { return rule_; }

private:
    Stage stage_;
    std::string rule_;
};

struct ParseContext {
    /// When set, evidence and validation quotes must occur in this text.
    std::optional<std::string> post_text;
    std::string need_prefix = "I need";
};

/// Returns the first balanced `{...}` span in `raw` that parses as a JSON
/// object, skipping braces inside string literals. Empty if there is none.
std::optional<std::string> extract_first_object(std::string_view raw);

StageOutput parse_stage_output(Stage stage, std::string_view raw, const ParseContext& ctx = {});

/// Throws InvariantError for the first violated invariant of `out`.
void check_stage_invariants(const StageOutput& out, const ParseContext& ctx);

} // namespace eftcot

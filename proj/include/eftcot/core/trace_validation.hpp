#pragma once

#include <string>
#include <vector>

#include "eftcot/core/stage_parser.hpp"
#include "eftcot/core/types.hpp"

namespace eftcot {

namespace rule {
inline constexpr const char* kMissingStage = "missing-stage";
inline constexpr const char* kStageMeta = "stage-meta";
inline constexpr const char* kNonEmpty = "non-empty";
inline constexpr const char* kEmotionLevels = "emotion-levels";
inline constexpr const char* kQuoteInPost = "quote-in-post";
inline constexpr const char* kNeedPrefix = "need-prefix";
inline constexpr const char* kNarrativeChanged = "narrative-changed";
inline constexpr const char* kValidationQuotes = "validation-quotes";
inline constexpr const char* kPostText = "post-text";
} // namespace rule

struct Violation {
    Stage stage;
    std::string rule;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Violations of one stage output against the type invariants, in field order.
std::vector<Violation> stage_violations(const StageOutput& out, const ParseContext& ctx);

/// Post-level problems (empty text) are reported against A1.
ValidationReport validate_trace(const ReasoningTrace& trace, const std::string& need_prefix = "I need");

} // namespace eftcot

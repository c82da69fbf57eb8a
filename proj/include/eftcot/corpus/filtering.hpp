#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eftcot/core/types.hpp"
#include "eftcot/gateway/gateway.hpp"

namespace eftcot::corpus {

struct FilterResult {
    std::vector<InstructionTriplet> kept;
    std::vector<InstructionTriplet> removed;
};

/// A triplet is removed iff any stage response was refusal-flagged or its
/// output matches one of the refusal patterns (normalized, case-insensitive).
FilterResult filter_high_risk(std::vector<InstructionTriplet> triplets, const std::vector<std::string>& refusal_patterns);

struct AuditVerdict {
    bool flagged = false;
    std::optional<std::string> reason;

    bool operator==(const AuditVerdict&) const = default;
};

class AuditParseError : public Error {
public:
    using Error::Error;
};

/// Parses `{"flagged": bool, "reason": string}` out of a judge reply.
AuditVerdict parse_audit_verdict(std::string_view reply);

/// Default audit system prompt; `{{record}}` receives the record text.
std::string default_audit_prompt();

/// Sends the record under the audit prompt to `audit_endpoint`. Gateway
/// errors propagate.
AuditVerdict semantic_audit(const InstructRecord& record, gateway::Gateway& gw,
                            const gateway::ModelEndpoint& audit_endpoint,
                            const std::string& audit_prompt = default_audit_prompt());

/// Drops the reasoning trace, keeping only instruction, input and output.
InstructRecord strip_cot(const InstructionTriplet& triplet, const std::string& instruction_text);

struct CorpusStats {
    std::size_t total_in = 0;
    std::size_t removed_refusal = 0;
    std::size_t removed_audit = 0;
    std::size_t kept = 0;
    /// Rounded to 4 decimal places.
    double exclusion_rate = 0.0;

    bool operator==(const CorpusStats&) const = default;
};

CorpusStats compute_stats(std::size_t pre_count, std::size_t removed_refusal, std::size_t removed_audit);

} // namespace eftcot::corpus

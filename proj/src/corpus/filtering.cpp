#include "eftcot/corpus/filtering.hpp"

#include <cmath>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/stage_parser.hpp"
#include "eftcot/pipeline/prompts.hpp"

namespace eftcot::corpus {

FilterResult filter_high_risk(std::vector<InstructionTriplet> triplets, const std::vector<std::string>& refusal_patterns) {
    if (refusal_patterns.empty()) throw ConfigError("refusal pattern list is empty");
    const gateway::RefusalDetector detector(refusal_patterns);
    FilterResult result;
    for (auto& t : triplets) {
        if (t.cot.any_refusal() || detector.matches(t.output)) result.removed.push_back(std::move(t));
        else result.kept.push_back(std::move(t));
    }
    return result;
}

AuditVerdict parse_audit_verdict(std::string_view reply) {
    auto object = extract_first_object(reply);
    if (!object) throw AuditParseError("audit reply contains no JSON object");
    const json j = json::parse(*object);
    auto flagged = j.find("flagged");
    if (flagged == j.end() || !flagged->is_boolean()) throw AuditParseError("audit reply lacks a boolean 'flagged'");
    AuditVerdict v;
    v.flagged = flagged->get<bool>();
    if (v.flagged) {
        auto reason = j.find("reason");
        v.reason = (reason != j.end() && reason->is_string() && !reason->get<std::string>().empty())
                       ? reason->get<std::string>()
                       : std::string("unspecified");
    }
    return v;
}

std::string default_audit_prompt() {
    return "You audit training data for a psychological counseling assistant. Read the record below and decide "
           "whether it contains latent sensitive information, identifying details, unsafe advice, detailed "
           "self-harm content or other ethical risks that should keep it out of a training corpus.\n"
           "Reply with a single JSON object: {\"flagged\": true or false, \"reason\": \"short reason when flagged\"}.\n\n"
           "Record:\n{{record}}";
}

AuditVerdict semantic_audit(const InstructRecord& record, gateway::Gateway& gw,
                            const gateway::ModelEndpoint& audit_endpoint, const std::string& audit_prompt) {
    gateway::ChatRequest request;
    request.system = pipeline::render_template(
        audit_prompt, {{"record", "Client post:\n" + record.input + "\n\nResponse:\n" + record.output}});
    request.user = "Return the audit verdict as one JSON object.";
    request.params = audit_endpoint.params;
    request.tag = "audit";
    const gateway::ChatResponse response = gw.complete_chat(audit_endpoint, request);
    return parse_audit_verdict(response.text);
}

InstructRecord strip_cot(const InstructionTriplet& triplet, const std::string& instruction_text) {
    return InstructRecord{instruction_text, triplet.input, triplet.output};
}

CorpusStats compute_stats(std::size_t pre_count, std::size_t removed_refusal, std::size_t removed_audit) {
    if (removed_refusal + removed_audit > pre_count) {
        throw Error("removed count exceeds the number of input samples");
    }
    CorpusStats s;
    s.total_in = pre_count;
    s.removed_refusal = removed_refusal;
    s.removed_audit = removed_audit;
    s.kept = pre_count - removed_refusal - removed_audit;
    if (pre_count > 0) {
        const double rate = static_cast<double>(removed_refusal + removed_audit) / static_cast<double>(pre_count);
        s.exclusion_rate = std::round(rate * 10000.0) / 10000.0;
    }
    return s;
}

} // namespace eftcot::corpus

#pragma once

#include <json.hpp>

#include "eftcot/core/types.hpp"

namespace eftcot {

/// A stored record (post, trace, triplet, instruct record) is missing a field
/// or has the wrong type.
class FormatError : public Error {
public:
    FormatError(std::string field, const std::string& detail);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Wire format. Field names are fixed; enum values are written capitalised and
// read case-insensitively. Structural problems raise SchemaError (see
// stage_parser.hpp); invariants are not checked here.

ordered_json to_json(const HelpSeekingPost& post);
ordered_json to_json(const StageOutput& out);
ordered_json to_json(const StageMeta& meta);
ordered_json to_json(const ReasoningTrace& trace);
ordered_json to_json(const InstructionTriplet& triplet);
ordered_json to_json(const InstructRecord& record);

HelpSeekingPost post_from_json(const json& j);
StageOutput stage_output_from_json(Stage stage, const json& j);
ReasoningTrace trace_from_json(const json& j);
InstructionTriplet triplet_from_json(const json& j);
InstructRecord record_from_json(const json& j);

/// Compact single-line UTF-8 serialisation used for JSONL lines.
std::string dump_line(const ordered_json& j);

} // namespace eftcot

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eftcot/core/error.hpp"

namespace eftcot {

/// Version of the stage-output and trace field schema written to trace files.
inline constexpr int kTraceSchemaVersion = 1;

enum class TopicCategory {
    Growth,
    Romance,
    Career,
    Marriage,
    Family,
    Emotion,
    Behavior,
    Interpersonal,
    Therapy,
};

inline constexpr std::array<TopicCategory, 9> kAllCategories = {
    TopicCategory::Growth,   TopicCategory::Romance,  TopicCategory::Career,
    TopicCategory::Marriage, TopicCategory::Family,   TopicCategory::Emotion,
    TopicCategory::Behavior, TopicCategory::Interpersonal, TopicCategory::Therapy,
};

class UnknownCategoryError : public Error {
public:
    explicit UnknownCategoryError(std::string label);
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

std::string_view to_string(TopicCategory c);
/// Case-insensitive; throws UnknownCategoryError for anything outside the nine labels.
TopicCategory parse_category(std::string_view label);

enum class Stage { A1, A2, A3, A4, A5, A6, A7, A8 };

inline constexpr std::array<Stage, 8> kAllStages = {
    Stage::A1, Stage::A2, Stage::A3, Stage::A4, Stage::A5, Stage::A6, Stage::A7, Stage::A8,
};

inline constexpr std::size_t stage_index(Stage s) { return static_cast<std::size_t>(s); }
/// "A1".."A8"
std::string_view to_string(Stage s);
/// "a1".."a8", the field name used in trace files.
std::string_view field_name(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

struct HelpSeekingPost {
    std::string id;
    std::string text;
    TopicCategory category = TopicCategory::Growth;
    std::map<std::string, std::string> source_meta;

    bool operator==(const HelpSeekingPost&) const = default;
};

enum class EmotionLevel { Primary, Secondary };

struct EmotionItem {
    std::string label;
    std::string evidence;
    EmotionLevel level = EmotionLevel::Primary;

    bool operator==(const EmotionItem&) const = default;
};

// A1
struct EmotionHierarchy {
    std::vector<EmotionItem> items;
    std::optional<std::string> somatic_hint;

    bool operator==(const EmotionHierarchy&) const = default;
};

// A2
struct SomaticMapping {
    std::vector<std::string> markers;
    std::string embodied_metaphor;

    bool operator==(const SomaticMapping&) const = default;
};

// A3
struct IntegratedState {
    std::string narrative;

    bool operator==(const IntegratedState&) const = default;
};

enum class Verdict { Adaptive, Maladaptive };

// A4
struct AdaptiveAssessment {
    std::string protective_function;
    std::string maladaptive_cost;
    Verdict verdict = Verdict::Maladaptive;

    bool operator==(const AdaptiveAssessment&) const = default;
};

// A5
struct BeliefSchema {
    std::string negative_schema;
    std::string behavioral_drive;

    bool operator==(const BeliefSchema&) const = default;
};

// A6
struct NeedExpression {
    std::string core_need;
    std::string explicit_statement;

    bool operator==(const NeedExpression&) const = default;
};

// A7
struct NarrativeFrame {
    std::string old_narrative;
    std::string new_narrative;
    std::vector<std::string> validation_quotes;
    std::string empathy_metaphor;
    std::string guidance;

    bool operator==(const NarrativeFrame&) const = default;
};

// A8
struct FinalResponse {
    std::string text;

    bool operator==(const FinalResponse&) const = default;
};

/// Variant alternative index equals stage_index(stage).
using StageOutput = std::variant<EmotionHierarchy, SomaticMapping, IntegratedState,
                                 AdaptiveAssessment, BeliefSchema, NeedExpression,
                                 NarrativeFrame, FinalResponse>;

inline Stage stage_of(const StageOutput& out) { return static_cast<Stage>(out.index()); }

struct StageMeta {
    std::string endpoint_id;
    int retry_count = 0;
    std::int64_t started_ms = 0;
    std::int64_t wall_ms = 0;
    bool refusal = false;

    bool operator==(const StageMeta&) const = default;
};

struct ReasoningTrace {
    HelpSeekingPost post;
    std::optional<EmotionHierarchy> a1;
    std::optional<SomaticMapping> a2;
    std::optional<IntegratedState> a3;
    std::optional<AdaptiveAssessment> a4;
    std::optional<BeliefSchema> a5;
    std::optional<NeedExpression> a6;
    std::optional<NarrativeFrame> a7;
    std::optional<FinalResponse> a8;
    std::map<Stage, StageMeta> stage_meta;

    bool operator==(const ReasoningTrace&) const = default;

    bool has(Stage s) const;
    std::optional<StageOutput> output(Stage s) const;
    void set(StageOutput out);
    bool any_refusal() const;
};

struct InstructionTriplet {
    std::string instruction;
    std::string input;
    ReasoningTrace cot;
    std::string output;

    bool operator==(const InstructionTriplet&) const = default;
};

/// Builds a triplet whose input/output are taken from the trace. Requires a8.
InstructionTriplet make_triplet(std::string instruction, ReasoningTrace trace);

struct InstructRecord {
    std::string instruction;
    std::string input;
    std::string output;

    bool operator==(const InstructRecord&) const = default;
};

} // namespace eftcot

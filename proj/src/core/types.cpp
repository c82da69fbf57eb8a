#include "eftcot/core/types.hpp"

#include <algorithm>
#include <cctype>

namespace eftcot {

namespace {

constexpr std::array<std::string_view, 9> kCategoryNames = {
    "Growth", "Romance", "Career", "Marriage", "Family",
    "Emotion", "Behavior", "Interpersonal", "Therapy",
};

constexpr std::array<std::string_view, 8> kStageNames = {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8"};
constexpr std::array<std::string_view, 8> kStageFields = {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

} // namespace

UnknownCategoryError::UnknownCategoryError(std::string label)
    : Error("unknown topic category '" + label + "'"), label_(std::move(label)) {}

std::string_view to_string(TopicCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

TopicCategory parse_category(std::string_view label) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (iequals(label, kCategoryNames[i])) return static_cast<TopicCategory>(i);
    }
    throw UnknownCategoryError(std::string(label));
}

std::string_view to_string(Stage s) { return kStageNames[stage_index(s)]; }
std::string_view field_name(Stage s) { return kStageFields[stage_index(s)]; }

std::optional<Stage> parse_stage(std::string_view s) {
    for (std::size_t i = 0; i < kStageNames.size(); ++i) {
        if (iequals(s, kStageNames[i])) return static_cast<Stage>(i);
    }
    return std::nullopt;
}

bool ReasoningTrace::has(Stage s) const {
    switch (s) {
    case Stage::A1: return a1.has_value();
    case Stage::A2: return a2.has_value();
    case Stage::A3: return a3.has_value();
    case Stage::A4: return a4.has_value();
    case Stage::A5: return a5.has_value();
    case Stage::A6: return a6.has_value();
    case Stage::A7: return a7.has_value();
    case Stage::A8: return a8.has_value();
    }
    return false;
}

std::optional<StageOutput> ReasoningTrace::output(Stage s) const {
    switch (s) {
    case Stage::A1: if (a1) return StageOutput{*a1}; break;
    case Stage::A2: if (a2) return StageOutput{*a2}; break;
    case Stage::A3: if (a3) return StageOutput{*a3}; break;
    case Stage::A4: if (a4) return StageOutput{*a4}; break;
    case Stage::A5: if (a5) return StageOutput{*a5}; break;
    case Stage::A6: if (a6) return StageOutput{*a6}; break;
    case Stage::A7: if (a7) return StageOutput{*a7}; break;
    case Stage::A8: if (a8) return StageOutput{*a8}; break;
    }
    return std::nullopt;
}

void ReasoningTrace::set(StageOutput out) {
    std::visit(
        [this](auto&& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EmotionHierarchy>) a1 = std::move(v);
            else if constexpr (std::is_same_v<T, SomaticMapping>) a2 = std::move(v);
            else if constexpr (std::is_same_v<T, IntegratedState>) a3 = std::move(v);
            else if constexpr (std::is_same_v<T, AdaptiveAssessment>) a4 = std::move(v);
            else if constexpr (std::is_same_v<T, BeliefSchema>) a5 = std::move(v);
            else if constexpr (std::is_same_v<T, NeedExpression>) a6 = std::move(v);
            else if constexpr (std::is_same_v<T, NarrativeFrame>) a7 = std::move(v);
            else a8 = std::move(v);
        },
        std::move(out));
}

bool ReasoningTrace::any_refusal() const {
    return std::any_of(stage_meta.begin(), stage_meta.end(), [](const auto& kv) { return kv.second.refusal; });
}

InstructionTriplet make_triplet(std::string instruction, ReasoningTrace trace) {
    if (!trace.a8) throw Error("cannot build a triplet from a trace without an A8 response");
    InstructionTriplet t;
    t.instruction = std::move(instruction);
    t.input = trace.post.text;
    t.output = trace.a8->text;
    t.cot = std::move(trace);
    return t;
}

} // namespace eftcot

#include "eftcot/core/trace_validation.hpp"

#include "eftcot/core/unicode.hpp"

namespace eftcot {

namespace {

class Collector {
public:
    Collector(Stage stage, std::vector<Violation>& out) : stage_(stage), out_(out) {}

    void non_empty(const std::string& value, const char* field) {
        if (text::is_blank(value)) add(rule::kNonEmpty, std::string(field) + " is empty");
    }

    void in_post(const std::string& quote, const ParseContext& ctx, const char* what) {
        if (!ctx.post_text) return;
        if (!text::contains_normalized(*ctx.post_text, quote)) {
            add(rule::kQuoteInPost, std::string(what) + " \"" + quote + "\" does not occur in the post");
        }
    }

    void add(const char* rule, std::string detail) { out_.push_back(Violation{stage_, rule, std::move(detail)}); }

private:
    Stage stage_;
    std::vector<Violation>& out_;
};

bool starts_with_prefix(const std::string& statement, const std::string& prefix) {
    const std::u32string s = text::normalize_codepoints(statement);
    const std::u32string p = text::normalize_codepoints(prefix);
    return !p.empty() && s.size() >= p.size() && s.compare(0, p.size(), p) == 0;
}

} // namespace

std::vector<Violation> stage_violations(const StageOutput& out, const ParseContext& ctx) {
    std::vector<Violation> violations;
    Collector c(stage_of(out), violations);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EmotionHierarchy>) {
                bool primary = false;
                bool secondary = false;
                for (const auto& item : v.items) {
                    (item.level == EmotionLevel::Primary ? primary : secondary) = true;
                    c.non_empty(item.label, "items.label");
                    if (text::is_blank(item.evidence)) c.non_empty(item.evidence, "items.evidence");
                    else c.in_post(item.evidence, ctx, "evidence");
                }
                if (!primary || !secondary) {
                    c.add(rule::kEmotionLevels, "needs at least one Primary and one Secondary item");
                }
            } else if constexpr (std::is_same_v<T, SomaticMapping>) {
                c.non_empty(v.embodied_metaphor, "embodied_metaphor");
                for (const auto& m : v.markers) c.non_empty(m, "markers[]");
            } else if constexpr (std::is_same_v<T, IntegratedState>) {
                c.non_empty(v.narrative, "narrative");
            } else if constexpr (std::is_same_v<T, AdaptiveAssessment>) {
                c.non_empty(v.protective_function, "protective_function");
                c.non_empty(v.maladaptive_cost, "maladaptive_cost");
            } else if constexpr (std::is_same_v<T, BeliefSchema>) {
                c.non_empty(v.negative_schema, "negative_schema");
                c.non_empty(v.behavioral_drive, "behavioral_drive");
            } else if constexpr (std::is_same_v<T, NeedExpression>) {
                c.non_empty(v.core_need, "core_need");
                if (!starts_with_prefix(v.explicit_statement, ctx.need_prefix)) {
                    c.add(rule::kNeedPrefix, "explicit_statement must begin with \"" + ctx.need_prefix + "\"");
                }
            } else if constexpr (std::is_same_v<T, NarrativeFrame>) {
                c.non_empty(v.old_narrative, "old_narrative");
                c.non_empty(v.new_narrative, "new_narrative");
                if (text::normalize_for_match(v.old_narrative) == text::normalize_for_match(v.new_narrative)) {
                    c.add(rule::kNarrativeChanged, "new_narrative repeats old_narrative");
                }
                if (v.validation_quotes.empty()) c.add(rule::kValidationQuotes, "validation_quotes is empty");
                for (const auto& q : v.validation_quotes) {
                    if (text::is_blank(q)) c.non_empty(q, "validation_quotes[]");
                    else c.in_post(q, ctx, "validation quote");
                }
            } else {
                c.non_empty(v.text, "text");
            }
        },
        out);
    return violations;
}

ValidationReport validate_trace(const ReasoningTrace& trace, const std::string& need_prefix) {
    ValidationReport report;
    if (text::is_blank(trace.post.text)) {
        report.violations.push_back({Stage::A1, rule::kPostText, "post text is empty"});
    }
    ParseContext ctx;
    ctx.post_text = trace.post.text;
    ctx.need_prefix = need_prefix;
    for (Stage s : kAllStages) {
        auto out = trace.output(s);
        if (!out) {
            report.violations.push_back({s, rule::kMissingStage, "stage output absent"});
            continue;
        }
        if (!trace.stage_meta.contains(s)) {
            report.violations.push_back({s, rule::kStageMeta, "stage_meta has no entry for this stage"});
        }
        auto vs = stage_violations(*out, ctx);
        report.violations.insert(report.violations.end(), vs.begin(), vs.end());
    }
    for (const auto& [s, meta] : trace.stage_meta) {
        if (!trace.has(s)) report.violations.push_back({s, rule::kStageMeta, "stage_meta present without output"});
    }
    return report;
}

} // namespace eftcot

#include "eftcot/core/json_io.hpp"

#include <algorithm>
#include <cctype>

#include "eftcot/core/stage_parser.hpp"

namespace eftcot {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

/// Field access that reports failures through the caller's error factory.
template <typename Fail>
class Fields {
public:
    Fields(const json& j, Fail fail) : j_(j), fail_(std::move(fail)) {
        if (!j_.is_object()) fail_("", "expected a JSON object");
    }

    std::string str(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) fail_(key, "missing required field");
        if (!it->is_string()) fail_(key, "expected a string");
        return it->template get<std::string>();
    }

    std::optional<std::string> opt_str(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) fail_(key, "expected a string");
        return it->template get<std::string>();
    }

    std::vector<std::string> str_list(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) fail_(key, "missing required field");
        if (!it->is_array()) fail_(key, "expected an array of strings");
        std::vector<std::string> out;
        for (const auto& v : *it) {
            if (!v.is_string()) fail_(key, "expected an array of strings");
            out.push_back(v.template get<std::string>());
        }
        return out;
    }

    const json& array(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) fail_(key, "missing required field");
        if (!it->is_array()) fail_(key, "expected an array");
        return *it;
    }

    const json* object(const char* key, bool required) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) {
            if (required) fail_(key, "missing required field");
            return nullptr;
        }
        if (!it->is_object()) fail_(key, "expected an object");
        return &*it;
    }

    template <typename T>
    T number(const char* key, T fallback) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return fallback;
        if (!it->is_number()) fail_(key, "expected a number");
        return it->template get<T>();
    }

    bool boolean(const char* key, bool fallback) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return fallback;
        if (!it->is_boolean()) fail_(key, "expected a boolean");
        return it->template get<bool>();
    }

private:
    const json& j_;
    Fail fail_;
};

auto format_fail(std::string prefix) {
    return [prefix = std::move(prefix)](const std::string& field, const std::string& detail) {
        const std::string name = prefix.empty() ? field : (field.empty() ? prefix : prefix + "." + field);
        throw FormatError(name, detail);
    };
}

auto stage_fail(Stage stage) {
    return [stage](const std::string& field, const std::string& detail) { throw SchemaError(stage, field, detail); };
}

ordered_json string_list(const std::vector<std::string>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& s : v) a.push_back(s);
    return a;
}

} // namespace

FormatError::FormatError(std::string field, const std::string& detail)
    : Error(field.empty() ? detail : "field '" + field + "': " + detail), field_(std::move(field)) {}

ordered_json to_json(const HelpSeekingPost& post) {
    ordered_json j;
    j["id"] = post.id;
    j["text"] = post.text;
    j["category"] = std::string(to_string(post.category));
    if (!post.source_meta.empty()) {
        ordered_json m = ordered_json::object();
        for (const auto& [k, v] : post.source_meta) m[k] = v;
        j["source_meta"] = std::move(m);
    }
    return j;
}

ordered_json to_json(const StageOutput& out) {
    ordered_json j;
    std::visit(
        [&j](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EmotionHierarchy>) {
                ordered_json items = ordered_json::array();
                for (const auto& item : v.items) {
                    ordered_json it;
                    it["label"] = item.label;
                    it["evidence"] = item.evidence;
                    it["level"] = item.level == EmotionLevel::Primary ? "Primary" : "Secondary";
                    items.push_back(std::move(it));
                }
                j["items"] = std::move(items);
                if (v.somatic_hint) j["somatic_hint"] = *v.somatic_hint;
            } else if constexpr (std::is_same_v<T, SomaticMapping>) {
                j["markers"] = string_list(v.markers);
                j["embodied_metaphor"] = v.embodied_metaphor;
            } else if constexpr (std::is_same_v<T, IntegratedState>) {
                j["narrative"] = v.narrative;
            } else if constexpr (std::is_same_v<T, AdaptiveAssessment>) {
                j["protective_function"] = v.protective_function;
                j["maladaptive_cost"] = v.maladaptive_cost;
                j["verdict"] = v.verdict == Verdict::Adaptive ? "Adaptive" : "Maladaptive";
            } else if constexpr (std::is_same_v<T, BeliefSchema>) {
                j["negative_schema"] = v.negative_schema;
                j["behavioral_drive"] = v.behavioral_drive;
            } else if constexpr (std::is_same_v<T, NeedExpression>) {
                j["core_need"] = v.core_need;
                j["explicit_statement"] = v.explicit_statement;
            } else if constexpr (std::is_same_v<T, NarrativeFrame>) {
                j["old_narrative"] = v.old_narrative;
                j["new_narrative"] = v.new_narrative;
                j["validation_quotes"] = string_list(v.validation_quotes);
                j["empathy_metaphor"] = v.empathy_metaphor;
                j["guidance"] = v.guidance;
            } else {
                j["text"] = v.text;
            }
        },
        out);
    return j;
}

ordered_json to_json(const StageMeta& meta) {
    ordered_json j;
    j["endpoint_id"] = meta.endpoint_id;
    j["retry_count"] = meta.retry_count;
    j["started_ms"] = meta.started_ms;
    j["wall_ms"] = meta.wall_ms;
    j["refusal"] = meta.refusal;
    return j;
}

ordered_json to_json(const ReasoningTrace& trace) {
    ordered_json j;
    j["schema_version"] = kTraceSchemaVersion;
    j["post"] = to_json(trace.post);
    for (Stage s : kAllStages) {
        if (auto out = trace.output(s)) j[std::string(field_name(s))] = to_json(*out);
    }
    ordered_json meta = ordered_json::object();
    for (const auto& [s, m] : trace.stage_meta) meta[std::string(field_name(s))] = to_json(m);
    j["stage_meta"] = std::move(meta);
    return j;
}

ordered_json to_json(const InstructionTriplet& t) {
    ordered_json j;
    j["instruction"] = t.instruction;
    j["input"] = t.input;
    j["output"] = t.output;
    j["cot"] = to_json(t.cot);
    return j;
}

ordered_json to_json(const InstructRecord& r) {
    ordered_json j;
    j["instruction"] = r.instruction;
    j["input"] = r.input;
    j["output"] = r.output;
    return j;
}

HelpSeekingPost post_from_json(const json& j) {
    Fields f(j, format_fail("post"));
    HelpSeekingPost p;
    p.id = f.str("id");
    p.text = f.str("text");
    p.category = parse_category(f.str("category"));
    if (const json* meta = f.object("source_meta", false)) {
        for (const auto& [k, v] : meta->items()) {
            if (!v.is_string()) throw FormatError("post.source_meta." + k, "expected a string");
            p.source_meta[k] = v.get<std::string>();
        }
    }
    return p;
}

StageOutput stage_output_from_json(Stage stage, const json& j) {
    Fields f(j, stage_fail(stage));
    switch (stage) {
    case Stage::A1: {
        EmotionHierarchy h;
        for (const auto& raw : f.array("items")) {
            Fields item(raw, [stage](const std::string& field, const std::string& detail) {
                throw SchemaError(stage, "items." + field, detail);
            });
            EmotionItem e;
            e.label = item.str("label");
            e.evidence = item.str("evidence");
            const std::string level = lower(item.str("level"));
            if (level == "primary") e.level = EmotionLevel::Primary;
            else if (level == "secondary") e.level = EmotionLevel::Secondary;
            else throw SchemaError(stage, "items.level", "expected Primary or Secondary, got '" + level + "'");
            h.items.push_back(std::move(e));
        }
        h.somatic_hint = f.opt_str("somatic_hint");
        return h;
    }
    case Stage::A2: {
        SomaticMapping m;
        auto it = j.find("markers");
        if (it != j.end() && !it->is_null()) m.markers = f.str_list("markers");
        m.embodied_metaphor = f.str("embodied_metaphor");
        return m;
    }
    case Stage::A3:
        return IntegratedState{f.str("narrative")};
    case Stage::A4: {
        AdaptiveAssessment a;
        a.protective_function = f.str("protective_function");
        a.maladaptive_cost = f.str("maladaptive_cost");
        const std::string verdict = lower(f.str("verdict"));
        if (verdict == "adaptive") a.verdict = Verdict::Adaptive;
        else if (verdict == "maladaptive") a.verdict = Verdict::Maladaptive;
        else throw SchemaError(stage, "verdict", "expected Adaptive or Maladaptive, got '" + verdict + "'");
        return a;
    }
    case Stage::A5:
        return BeliefSchema{f.str("negative_schema"), f.str("behavioral_drive")};
    case Stage::A6:
        return NeedExpression{f.str("core_need"), f.str("explicit_statement")};
    case Stage::A7: {
        NarrativeFrame n;
        n.old_narrative = f.str("old_narrative");
        n.new_narrative = f.str("new_narrative");
        n.validation_quotes = f.str_list("validation_quotes");
        n.empathy_metaphor = f.opt_str("empathy_metaphor").value_or("");
        n.guidance = f.opt_str("guidance").value_or("");
        return n;
    }
    case Stage::A8:
        return FinalResponse{f.str("text")};
    }
    throw SchemaError(stage, "", "unknown stage");
}

ReasoningTrace trace_from_json(const json& j) {
    Fields f(j, format_fail(""));
    ReasoningTrace t;
    t.post = post_from_json(*f.object("post", true));
    for (Stage s : kAllStages) {
        const std::string key(field_name(s));
        if (const json* obj = f.object(key.c_str(), false)) t.set(stage_output_from_json(s, *obj));
    }
    if (const json* meta = f.object("stage_meta", false)) {
        for (const auto& [k, v] : meta->items()) {
            auto stage = parse_stage(k);
            if (!stage) throw FormatError("stage_meta." + k, "unknown stage id");
            Fields mf(v, format_fail("stage_meta." + k));
            StageMeta m;
            m.endpoint_id = mf.opt_str("endpoint_id").value_or("");
            m.retry_count = mf.number<int>("retry_count", 0);
            m.started_ms = mf.number<std::int64_t>("started_ms", 0);
            m.wall_ms = mf.number<std::int64_t>("wall_ms", 0);
            m.refusal = mf.boolean("refusal", false);
            t.stage_meta[*stage] = std::move(m);
        }
    }
    return t;
}

InstructionTriplet triplet_from_json(const json& j) {
    Fields f(j, format_fail(""));
    InstructionTriplet t;
    t.instruction = f.str("instruction");
    t.input = f.str("input");
    t.output = f.str("output");
    t.cot = trace_from_json(*f.object("cot", true));
    return t;
}

InstructRecord record_from_json(const json& j) {
    Fields f(j, format_fail(""));
    return InstructRecord{f.str("instruction"), f.str("input"), f.str("output")};
}

std::string dump_line(const ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

} // namespace eftcot

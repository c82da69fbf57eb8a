#include "eftcot/pipeline/pipeline.hpp"

#include <chrono>
#include <mutex>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/parallel.hpp"
#include "eftcot/core/trace_validation.hpp"

namespace eftcot::pipeline {

StageError::StageError(Stage stage, std::string last_error)
    : Error(std::string(to_string(stage)) + " failed: " + last_error), stage_(stage), last_error_(std::move(last_error)) {}

std::int64_t steady_now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::map<std::string, std::string> stage_bindings(Stage stage, const ReasoningTrace& prior,
                                                  const PipelineOptions& options) {
    std::map<std::string, std::string> values;
    values["post"] = prior.post.text;
    values["category"] = std::string(to_string(prior.post.category));
    values["need_prefix"] = options.need_prefix;
    for (Stage s : kAllStages) {
        if (stage_index(s) >= stage_index(stage)) break;
        if (auto out = prior.output(s)) values[std::string(field_name(s))] = dump_line(to_json(*out));
    }
    return values;
}

namespace {

std::string instruction_for(Stage stage) {
    return "Produce the " + std::string(to_string(stage)) + " output now as a single JSON object.";
}

std::string anchor_feedback(const AnchorReport& report, const ReasoningTrace& trace) {
    std::string msg = "the response failed the " + report.first_failure() + " check.";
    if (!report.context_ok && trace.a7) {
        msg += " Quote at least one of the client's phrases verbatim:";
        for (const auto& q : trace.a7->validation_quotes) msg += " \"" + q + "\"";
        msg += ".";
    }
    if (!report.empathy_ok) {
        const std::string m = trace.a7 && !trace.a7->empathy_metaphor.empty() ? trace.a7->empathy_metaphor
                              : trace.a2                                    ? trace.a2->embodied_metaphor
                                                                            : std::string();
        msg += " Embed the embodied metaphor \"" + m + "\".";
    }
    if (!report.logic_ok && trace.a7) {
        msg += " Carry the new narrative through: \"" + trace.a7->new_narrative + "\".";
    }
    return msg;
}

} // namespace

StageResult run_stage(Stage stage, const HelpSeekingPost& post, const ReasoningTrace& prior, PipelineContext& ctx,
                      const std::string& feedback) {
    const StagePrompt& prompt = ctx.prompts.get(stage);
    for (const auto& name : prompt.bindings) {
        if (auto bound = parse_stage(name); bound && !prior.has(*bound)) {
            throw StageError(stage, "prior output " + name + " is missing");
        }
    }
    ReasoningTrace view = prior;
    view.post = post;
    const std::string system = render_template(prompt.system_template, stage_bindings(stage, view, ctx.options));

    const gateway::ModelEndpoint* endpoint = nullptr;
    try {
        endpoint = &gateway::resolve_route(ctx.routing, post.category);
    } catch (const gateway::RouteError& e) {
        throw StageError(stage, e.what());
    }

    ParseContext parse_ctx;
    parse_ctx.post_text = post.text;
    parse_ctx.need_prefix = ctx.options.need_prefix;

    StageMeta meta;
    meta.endpoint_id = endpoint->id;
    meta.started_ms = ctx.options.clock();

    std::string rejection = feedback;
    std::string last_error;
    for (int attempt = 0; attempt <= ctx.options.stage_max_retries; ++attempt) {
        gateway::ChatRequest request;
        request.system = system;
        request.user = instruction_for(stage);
        if (!rejection.empty()) {
            request.user += "\n\nYour previous reply was rejected: " + rejection +
                            "\nReply again with one corrected JSON object.";
        }
        request.params = endpoint->params;
        request.tag = std::string(to_string(stage));

        gateway::ChatResponse response;
        try {
            response = ctx.gateway.complete_chat(*endpoint, request);
        } catch (const gateway::GatewayError& e) {
            throw StageError(stage, e.what());
        }
        meta.refusal = meta.refusal || response.refusal;
        try {
            StageResult result{parse_stage_output(stage, response.text, parse_ctx), meta};
            result.meta.retry_count = attempt;
            result.meta.wall_ms = ctx.options.clock() - meta.started_ms;
            return result;
        } catch (const SchemaError& e) {
            last_error = e.what();
        } catch (const InvariantError& e) {
            last_error = e.what();
        }
        if (response.refusal) throw StageError(stage, "refusal: " + last_error);
        rejection = last_error;
    }
    throw StageError(stage, last_error);
}

PipelineRun run_pipeline(const HelpSeekingPost& post, PipelineContext& ctx) {
    PipelineRun run;
    run.trace.post = post;
    auto fail = [&run](Stage stage, std::string reason) {
        run.status.ok = false;
        run.status.failed_stage = stage;
        run.status.reason = std::move(reason);
    };

    for (Stage s : kAllStages) {
        try {
            StageResult r = run_stage(s, post, run.trace, ctx);
            run.trace.set(std::move(r.output));
            run.trace.stage_meta[s] = r.meta;
        } catch (const StageError& e) {
            fail(s, e.last_error());
            return run;
        }
    }

    run.anchor_report = verify_anchors(*run.trace.a8, run.trace, ctx.options.thresholds);
    for (int regen = 0; !run.anchor_report.passed && regen < ctx.options.anchor_regenerations; ++regen) {
        try {
            StageResult r = run_stage(Stage::A8, post, run.trace, ctx, anchor_feedback(run.anchor_report, run.trace));
            r.meta.retry_count += run.trace.stage_meta[Stage::A8].retry_count + 1;
            r.meta.started_ms = run.trace.stage_meta[Stage::A8].started_ms;
            r.meta.wall_ms = ctx.options.clock() - r.meta.started_ms;
            r.meta.refusal = r.meta.refusal || run.trace.stage_meta[Stage::A8].refusal;
            run.trace.set(std::move(r.output));
            run.trace.stage_meta[Stage::A8] = r.meta;
        } catch (const StageError& e) {
            fail(Stage::A8, e.last_error());
            return run;
        }
        run.anchor_report = verify_anchors(*run.trace.a8, run.trace, ctx.options.thresholds);
    }

    const ValidationReport validation = validate_trace(run.trace, ctx.options.need_prefix);
    if (!validation.ok()) {
        const Violation& v = validation.violations.front();
        fail(v.stage, v.rule + ": " + v.detail);
    } else if (!run.anchor_report.passed) {
        fail(Stage::A8, run.anchor_report.first_failure());
    }
    return run;
}

void run_batch(std::span<const HelpSeekingPost> posts, PipelineContext& ctx, int workers,
               const std::function<void(std::size_t, const PipelineRun&)>& sink) {
    std::vector<std::optional<PipelineRun>> done(posts.size());
    std::size_t next_to_emit = 0;
    std::mutex m;
    parallel_for(posts.size(), workers, [&](std::size_t i) {
        PipelineRun run = run_pipeline(posts[i], ctx);
        std::scoped_lock lock(m);
        done[i] = std::move(run);
        while (next_to_emit < done.size() && done[next_to_emit]) {
            sink(next_to_emit, *done[next_to_emit]);
            done[next_to_emit].reset();
            ++next_to_emit;
        }
    });
}

} // namespace eftcot::pipeline

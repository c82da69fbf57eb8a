#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "eftcot/core/stage_parser.hpp"
#include "eftcot/core/types.hpp"
#include "eftcot/gateway/gateway.hpp"
#include "eftcot/gateway/routing.hpp"
#include "eftcot/pipeline/anchors.hpp"
#include "eftcot/pipeline/prompts.hpp"

namespace eftcot::pipeline {

class StageError : public Error {
public:
    StageError(Stage stage, std::string last_error);
    Stage stage() const noexcept { return stage_; }
    const std::string& last_error() const noexcept { return last_error_; }

private:
    Stage stage_;
    std::string last_error_;
};

using Clock = std::function<std::int64_t()>;

/// Milliseconds on the steady clock.
std::int64_t steady_now_ms();

struct PipelineOptions {
    int stage_max_retries = 2;
    /// A8 regenerations after a failed anchor check before the run is marked Failed.
    int anchor_regenerations = 1;
    AnchorThresholds thresholds;
    std::string need_prefix = "I need";
    Clock clock = steady_now_ms;
};

struct RunStatus {
    bool ok = true;
    std::optional<Stage> failed_stage;
    std::string reason;

    bool operator==(const RunStatus&) const = default;
};

struct PipelineRun {
    ReasoningTrace trace;
    AnchorReport anchor_report;
    RunStatus status;

    bool operator==(const PipelineRun&) const = default;
};

struct StageResult {
    StageOutput output;
    StageMeta meta;
};

/// Everything a stage execution needs besides the post and prior outputs.
struct PipelineContext {
    gateway::Gateway& gateway;
    const gateway::RoutingTable& routing;
    const PromptSet& prompts;
    PipelineOptions options;
};

/// Values interpolated into the stage's template.
std::map<std::string, std::string> stage_bindings(Stage stage, const ReasoningTrace& prior, const PipelineOptions& options);

/// Renders the stage prompt, calls the category's endpoint and parses the
/// reply. Invalid replies are re-prompted with the validator's message up to
/// options.stage_max_retries times; `feedback` seeds the first prompt.
StageResult run_stage(Stage stage, const HelpSeekingPost& post, const ReasoningTrace& prior,
                      PipelineContext& ctx, const std::string& feedback = {});

/// Runs A1..A8 strictly in order, then validates the trace and the response anchors.
PipelineRun run_pipeline(const HelpSeekingPost& post, PipelineContext& ctx);

/// Runs posts concurrently on `workers` threads; `sink` receives runs in input order.
void run_batch(std::span<const HelpSeekingPost> posts, PipelineContext& ctx, int workers,
               const std::function<void(std::size_t, const PipelineRun&)>& sink);

} // namespace eftcot::pipeline

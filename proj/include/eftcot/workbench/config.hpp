#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eftcot/gateway/gateway.hpp"
#include "eftcot/gateway/routing.hpp"
#include "eftcot/judge/harness.hpp"
#include "eftcot/judge/stats.hpp"
#include "eftcot/metrics/report.hpp"
#include "eftcot/pipeline/pipeline.hpp"

namespace eftcot::workbench {

/// Every problem found while loading a config, reported together.
class ConfigValidationError : public ConfigError {
public:
    explicit ConfigValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct EmbedderConfig {
    enum class Kind { None, Toy, Http } kind = Kind::None;
    std::size_t dimension = 64;     // toy
    std::string endpoint_id;        // http
};

struct RunConfig {
    std::filesystem::path path;
    std::string sha256;

    std::vector<gateway::ModelEndpoint> endpoints;
    std::map<TopicCategory, std::string> routes;
    std::optional<std::string> default_route;
    gateway::GatewayOptions gateway;
    std::optional<std::filesystem::path> stub_script;

    std::filesystem::path prompt_dir;
    pipeline::PipelineOptions pipeline;

    std::string instruction;
    double train_fraction = 0.9;
    std::size_t per_category = 20;
    std::optional<std::string> audit_endpoint;
    std::string audit_prompt;
    std::vector<std::string> filter_patterns;

    metrics::MetricOptions metrics;
    EmbedderConfig embedder;

    std::vector<std::string> judge_panel;
    judge::JudgeMode judge_mode = judge::JudgeMode::Comparative;
    /// Empty means all nine dimensions.
    std::vector<judge::Dimension> judge_dimensions;
    std::optional<std::filesystem::path> rubric_dir;
    double alpha = 0.05;
    std::size_t exact_cutoff = 25;
    judge::TieMode tie_mode = judge::TieMode::Half;
    std::string reference_system;
    std::vector<std::string> redact_terms;

    gateway::RoutingTable routing() const;
    const gateway::ModelEndpoint& endpoint(const std::string& id) const;
};

/// Loads a JSON run config. Relative paths resolve against the config's
/// directory. NO_NETWORK=1 in the environment forces stub-only mode.
RunConfig load_run_config(const std::filesystem::path& path);

/// Environment variables named by `endpoint_ids` that are unset; empty in stub-only mode.
std::vector<std::string> missing_credentials(const RunConfig& config, const std::vector<std::string>& endpoint_ids);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace eftcot::workbench

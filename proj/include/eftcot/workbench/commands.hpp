#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eftcot/workbench/config.hpp"
#include "eftcot/workbench/manifest.hpp"

namespace eftcot::workbench {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int job_failures = 1;
inline constexpr int config = 2;
inline constexpr int io = 3;
}  // namespace exit_code

/// Maps an exception from a command to its process exit code.
int exit_code_for(const std::exception& e);

struct CommandResult {
    int exit_code = exit_code::ok;
    RunManifest manifest;
    std::filesystem::path manifest_path;
};

struct SynthesizeOptions {
    std::uint64_t seed = 0;
    int workers = 1;
    bool resume = false;
    bool strict = false;
    std::optional<std::size_t> limit;
};

/// Pipeline over every post; triplets JSONL at `out`, manifest beside it.
CommandResult cmd_synthesize(const RunConfig& config, const std::filesystem::path& corpus,
                             const std::filesystem::path& out, const SynthesizeOptions& options);

struct BuildDatasetOptions {
    std::uint64_t seed = 0;
    int workers = 1;
    bool strict = false;
    /// Overrides the configured core-set size per category; 0 skips the core set.
    std::optional<std::size_t> per_category;
};

/// Filter, audit, strip, split and sample; writes train/test/core set, stats,
/// quarantine and manifest into `out_dir`.
CommandResult cmd_build_dataset(const RunConfig& config, const std::filesystem::path& triplets,
                                const std::filesystem::path& out_dir, const BuildDatasetOptions& options);

struct EvalAutoOptions {
    std::string system_name = "system";
    bool no_embedder = false;
    int workers = 1;
};

/// Metric report (metrics.json, metrics.md) for a pairs JSONL.
CommandResult cmd_eval_auto(const RunConfig* config, const std::filesystem::path& pairs,
                            const std::filesystem::path& out_dir, const EvalAutoOptions& options);

struct SystemResponses {
    std::string name;
    std::filesystem::path path;
};

/// Systems that lack responses for some case ids.
class CoverageError : public Error {
public:
    CoverageError(std::string system, std::vector<std::string> missing);
    const std::string& system() const noexcept { return system_; }
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::string system_;
    std::vector<std::string> missing_;
};

struct EvalJudgeOptions {
    std::uint64_t seed = 0;
    int workers = 1;
    bool strict = false;
    std::optional<std::size_t> limit;
    std::optional<std::string> reference_system;
};

/// Blind panel review of every system's responses over the case file.
CommandResult cmd_eval_judge(const RunConfig& config, const std::filesystem::path& cases,
                             const std::vector<SystemResponses>& systems, const std::filesystem::path& out_dir,
                             const EvalJudgeOptions& options);

struct TraceCheck {
    std::size_t records = 0;
    std::size_t invalid = 0;
    std::vector<std::string> messages;
};

/// Validates every trace in a trace or triplet JSONL file.
TraceCheck cmd_validate_trace(const std::filesystem::path& path, const std::string& need_prefix);

/// Renders tables from metric reports and/or score sheet files as Markdown.
std::string cmd_report(const std::vector<std::filesystem::path>& metric_reports,
                       const std::vector<std::filesystem::path>& score_files, const std::string& reference_system,
                       double alpha, std::size_t exact_cutoff);

/// Reads a responses JSONL: {id, response} (or output / candidate) per line.
std::map<std::string, std::string> load_responses(const std::filesystem::path& path);

} // namespace eftcot::workbench

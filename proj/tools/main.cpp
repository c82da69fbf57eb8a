#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "eftcot/workbench/commands.hpp"

namespace fs = std::filesystem;
using namespace eftcot;
using namespace eftcot::workbench;

namespace {

struct Common {
    std::string config_path;
    std::string stub_script;
    std::uint64_t seed = 0;
    int workers = 1;
    bool strict = false;
};

RunConfig load_config(const Common& c) {
    RunConfig cfg = load_run_config(c.config_path);
    if (!c.stub_script.empty()) {
        if (!fs::is_regular_file(c.stub_script)) {
            throw ConfigValidationError({"--stub-script: file " + c.stub_script + " does not exist"});
        }
        cfg.stub_script = fs::absolute(c.stub_script);
    }
    return cfg;
}

void log_manifest(const CommandResult& r) {
    for (const auto& [k, v] : r.manifest.counts) spdlog::info("{}: {}", k, v);
    for (const auto& f : r.manifest.failures) spdlog::warn("failure: {}", f.dump());
    spdlog::info("manifest written to {}", r.manifest_path.string());
}

SystemResponses parse_system(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw ConfigError("--system expects NAME=path, got '" + spec + "'");
    }
    return {spec.substr(0, eq), spec.substr(eq + 1)};
}

void add_common(CLI::App* cmd, Common& c, bool seeded) {
    cmd->add_option("-c,--config", c.config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--stub-script", c.stub_script, "Scripted replies used instead of live endpoints");
    if (seeded) cmd->add_option("--seed", c.seed, "Seed for every stochastic step")->required();
    cmd->add_option("-j,--workers", c.workers, "Parallel workers")->check(CLI::PositiveNumber);
    cmd->add_flag("--strict", c.strict, "Exit with status 1 when any job failed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion-focused reasoning traces: synthesis, dataset building and evaluation"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

    Common common;

    auto* synth = app.add_subcommand("synthesize", "Run the eight-stage pipeline over a corpus");
    std::string corpus, out;
    bool resume = false;
    std::optional<std::size_t> limit;
    add_common(synth, common, true);
    synth->add_option("--corpus", corpus, "Posts JSONL")->required()->check(CLI::ExistingFile);
    synth->add_option("-o,--out", out, "Triplets JSONL")->required();
    synth->add_flag("--resume", resume, "Skip posts already present in the output");
    synth->add_option("--limit", limit, "Process at most N posts");

    auto* build = app.add_subcommand("build-dataset", "Filter, audit, split and sample synthesized triplets");
    std::string triplets, out_dir;
    std::optional<std::size_t> per_category;
    add_common(build, common, true);
    build->add_option("--triplets", triplets, "Triplets JSONL")->required()->check(CLI::ExistingFile);
    build->add_option("-o,--out-dir", out_dir, "Output directory")->required();
    build->add_option("--per-category", per_category, "Core-set size per category (0 skips the core set)");

    auto* eval_auto = app.add_subcommand("eval-auto", "Automated metrics for candidate/reference pairs");
    std::string pairs, auto_config, system_name = "system";
    bool no_embedder = false;
    int auto_workers = 1;
    eval_auto->add_option("-c,--config", auto_config, "Run configuration (JSON)")->check(CLI::ExistingFile);
    eval_auto->add_option("--pairs", pairs, "Pairs JSONL")->required()->check(CLI::ExistingFile);
    eval_auto->add_option("-o,--out-dir", out_dir, "Output directory")->required();
    eval_auto->add_option("--system", system_name, "System label used in the table");
    eval_auto->add_flag("--no-embedder", no_embedder, "Skip BERTScore");
    eval_auto->add_option("-j,--workers", auto_workers, "Parallel workers")->check(CLI::PositiveNumber);

    auto* eval_judge = app.add_subcommand("eval-judge", "Blind rubric review by the judge panel");
    std::string cases, reference;
    std::vector<std::string> system_specs;
    std::optional<std::size_t> judge_limit;
    add_common(eval_judge, common, true);
    eval_judge->add_option("--cases", cases, "Cases JSONL (id plus input or post)")->required()->check(CLI::ExistingFile);
    eval_judge->add_option("--system", system_specs, "NAME=responses.jsonl, repeatable")->required();
    eval_judge->add_option("-o,--out-dir", out_dir, "Output directory")->required();
    eval_judge->add_option("--reference", reference, "System compared against the others");
    eval_judge->add_option("--limit", judge_limit, "Review at most N cases");

    auto* validate = app.add_subcommand("validate-trace", "Check trace invariants in a trace or triplet JSONL");
    std::string trace_file, need_prefix = "I need";
    validate->add_option("file", trace_file, "Trace or triplet JSONL")->required()->check(CLI::ExistingFile);
    validate->add_option("--need-prefix", need_prefix, "Required prefix of the need statement");

    auto* report = app.add_subcommand("report", "Render Markdown tables from metric reports and score sheets");
    std::vector<std::string> metric_files, score_files;
    std::string report_ref, report_out;
    double alpha = 0.05;
    std::size_t exact_cutoff = 25;
    report->add_option("--metrics", metric_files, "metrics.json files")->check(CLI::ExistingFile);
    report->add_option("--scores", score_files, "scores.jsonl files")->check(CLI::ExistingFile);
    report->add_option("--reference", report_ref, "Reference system for significance");
    report->add_option("--alpha", alpha, "Significance level");
    report->add_option("--exact-cutoff", exact_cutoff, "Largest n using the exact null distribution");
    report->add_option("-o,--out", report_out, "Write Markdown here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_mt("eftcot");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*synth) {
            SynthesizeOptions o{common.seed, common.workers, resume, common.strict, limit};
            const auto r = cmd_synthesize(load_config(common), corpus, out, o);
            log_manifest(r);
            return r.exit_code;
        }
        if (*build) {
            BuildDatasetOptions o{common.seed, common.workers, common.strict, per_category};
            const auto r = cmd_build_dataset(load_config(common), triplets, out_dir, o);
            log_manifest(r);
            return r.exit_code;
        }
        if (*eval_auto) {
            std::optional<RunConfig> cfg;
            if (!auto_config.empty()) cfg = load_run_config(auto_config);
            EvalAutoOptions o{system_name, no_embedder, auto_workers};
            const auto r = cmd_eval_auto(cfg ? &*cfg : nullptr, pairs, out_dir, o);
            log_manifest(r);
            std::cout << read_file(fs::path(out_dir) / "metrics.md");
            return r.exit_code;
        }
        if (*eval_judge) {
            std::vector<SystemResponses> systems;
            for (const auto& s : system_specs) systems.push_back(parse_system(s));
            EvalJudgeOptions o{common.seed, common.workers, common.strict, judge_limit, std::nullopt};
            if (!reference.empty()) o.reference_system = reference;
            const auto r = cmd_eval_judge(load_config(common), cases, systems, out_dir, o);
            log_manifest(r);
            std::cout << read_file(fs::path(out_dir) / "judge_report.md");
            return r.exit_code;
        }
        if (*validate) {
            const TraceCheck check = cmd_validate_trace(trace_file, need_prefix);
            for (const auto& m : check.messages) std::cout << m << "\n";
            std::cout << check.records << " record(s), " << check.invalid << " invalid\n";
            return check.invalid == 0 ? exit_code::ok : exit_code::job_failures;
        }
        if (*report) {
            if (metric_files.empty() && score_files.empty()) throw ConfigError("pass --metrics and/or --scores");
            std::vector<fs::path> m(metric_files.begin(), metric_files.end());
            std::vector<fs::path> s(score_files.begin(), score_files.end());
            const std::string md = cmd_report(m, s, report_ref, alpha, exact_cutoff);
            if (report_out.empty()) std::cout << md;
            else write_file_atomic(report_out, md);
            return exit_code::ok;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_code_for(e);
    }
    return exit_code::ok;
}

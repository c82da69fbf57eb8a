#include "eftcot/workbench/commands.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "eftcot/core/parallel.hpp"
#include "eftcot/core/rng.hpp"
#include "eftcot/core/stage_parser.hpp"
#include "eftcot/core/trace_validation.hpp"
#include "eftcot/core/unicode.hpp"
#include "eftcot/corpus/dataset.hpp"
#include "eftcot/corpus/filtering.hpp"
#include "eftcot/corpus/ingest.hpp"
#include "eftcot/gateway/http_transport.hpp"
#include "eftcot/gateway/stub_transport.hpp"
#include "eftcot/judge/report.hpp"
#include "eftcot/metrics/report.hpp"

namespace eftcot::workbench {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const CoverageError*>(&e) ||
        dynamic_cast<const corpus::InsufficientStratumError*>(&e) || dynamic_cast<const judge::RubricError*>(&e) ||
        dynamic_cast<const gateway::AuthError*>(&e) || dynamic_cast<const gateway::RouteError*>(&e)) {
        return exit_code::config;
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
        dynamic_cast<const UnknownCategoryError*>(&e) || dynamic_cast<const corpus::DuplicateIdError*>(&e) ||
        dynamic_cast<const json::exception*>(&e)) {
        return exit_code::io;
    }
    return exit_code::job_failures;
}

CoverageError::CoverageError(std::string system, std::vector<std::string> missing)
    : Error([&] {
          std::string msg = "system '" + system + "' has no response for " + std::to_string(missing.size()) +
                            " case(s):";
          for (const auto& id : missing) msg += " " + id;
          return msg;
      }()),
      system_(std::move(system)),
      missing_(std::move(missing)) {}

namespace {

std::unique_ptr<gateway::Gateway> make_gateway(const RunConfig& config, std::uint64_t seed) {
    bool needs_stub = config.gateway.stub_only;
    for (const auto& e : config.endpoints) needs_stub = needs_stub || e.kind == gateway::EndpointKind::Stub;
    std::shared_ptr<gateway::ChatTransport> stub;
    if (config.stub_script) {
        stub = std::make_shared<gateway::StubTransport>(gateway::load_stub_script(*config.stub_script));
    } else if (needs_stub) {
        throw ConfigError("a stub script is required for stub endpoints and NO_NETWORK=1 runs");
    }
    gateway::GatewayOptions options = config.gateway;
    options.jitter_seed = seed;
    return std::make_unique<gateway::Gateway>(options, std::make_shared<gateway::HttpTransport>(), stub);
}

void require_credentials(const RunConfig& config, const std::vector<std::string>& ids) {
    auto missing = missing_credentials(config, ids);
    if (missing.empty()) return;
    for (auto& m : missing) m = "environment variable " + m + " is not set";
    throw ConfigValidationError(missing);
}

std::vector<std::string> routed_endpoints(const RunConfig& config) {
    std::set<std::string> ids;
    for (const auto& [category, id] : config.routes) ids.insert(id);
    if (config.default_route) ids.insert(*config.default_route);
    return {ids.begin(), ids.end()};
}

RunManifest start_manifest(const std::string& command, const RunConfig* config) {
    RunManifest m;
    m.command = command;
    if (config != nullptr) {
        m.config_path = config->path.string();
        m.config_hash = config->sha256;
    }
    m.started_at = utc_timestamp();
    return m;
}

CommandResult finish(RunManifest manifest, const fs::path& manifest_path, int exit_code) {
    manifest.finished_at = utc_timestamp();
    write_file_atomic(manifest_path, to_json(manifest).dump(2) + "\n");
    return CommandResult{exit_code, std::move(manifest), manifest_path};
}

template <typename Fn>
void for_each_json_line(const fs::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::is_blank(line)) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw corpus::ParseError(number, path.string() + ": not valid JSON");
        try {
            fn(j, number);
        } catch (const FormatError& e) {
            throw corpus::ParseError(number, path.string() + ": " + e.what());
        } catch (const SchemaError& e) {
            throw corpus::ParseError(number, path.string() + ": " + e.what());
        } catch (const json::exception& e) {
            throw corpus::ParseError(number, path.string() + ": " + e.what());
        }
    }
}

std::string post_id_of_line(const std::string& line) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return {};
    if (auto cot = j.find("cot"); cot != j.end() && cot->is_object()) {
        if (auto post = cot->find("post"); post != cot->end() && post->is_object() && post->contains("id")) {
            return (*post)["id"].is_string() ? (*post)["id"].get<std::string>() : std::string{};
        }
    }
    return {};
}

} // namespace

CommandResult cmd_synthesize(const RunConfig& config, const fs::path& corpus_path, const fs::path& out,
                             const SynthesizeOptions& options) {
    RunManifest manifest = start_manifest("synthesize", &config);
    std::vector<HelpSeekingPost> posts = corpus::ingest_corpus(corpus_path);
    if (options.limit && posts.size() > *options.limit) posts.resize(*options.limit);
    require_credentials(config, routed_endpoints(config));
    const pipeline::PromptSet prompts = pipeline::PromptSet::load_directory(config.prompt_dir);
    auto gw = make_gateway(config, options.seed);
    const gateway::RoutingTable routing = config.routing();

    PartialWriter writer(out, options.resume);
    std::set<std::string> done;
    for (const auto& line : writer.carried_lines()) done.insert(post_id_of_line(line));
    std::vector<HelpSeekingPost> todo;
    for (auto& p : posts) {
        if (!done.count(p.id)) todo.push_back(std::move(p));
    }

    pipeline::PipelineContext ctx{*gw, routing, prompts, config.pipeline};
    std::uint64_t succeeded = 0;
    pipeline::run_batch(std::span<const HelpSeekingPost>(todo), ctx, options.workers,
                        [&](std::size_t, const pipeline::PipelineRun& run) {
                            if (run.status.ok) {
                                writer.write_line(dump_line(to_json(make_triplet(config.instruction, run.trace))));
                                ++succeeded;
                                return;
                            }
                            ordered_json f;
                            f["post_id"] = run.trace.post.id;
                            f["stage"] = run.status.failed_stage ? std::string(to_string(*run.status.failed_stage))
                                                                 : std::string();
                            f["reason"] = run.status.reason;
                            manifest.failures.push_back(f);
                        });
    writer.commit();

    manifest.inputs["corpus"] = corpus_path.string();
    manifest.outputs["triplets"] = out.string();
    manifest.counts["posts"] = posts.size();
    manifest.counts["skipped_existing"] = posts.size() - todo.size();
    manifest.counts["processed"] = todo.size();
    manifest.counts["succeeded"] = succeeded;
    manifest.counts["failed"] = manifest.failures.size();
    manifest.seeds["seed"] = options.seed;
    manifest.options = ordered_json{{"workers", options.workers},
                                    {"resume", options.resume},
                                    {"strict", options.strict},
                                    {"stub_only", config.gateway.stub_only}};
    const int code = options.strict && !manifest.failures.empty() ? exit_code::job_failures : exit_code::ok;
    return finish(std::move(manifest), fs::path(out.string() + ".manifest.json"), code);
}

CommandResult cmd_build_dataset(const RunConfig& config, const fs::path& triplets_path, const fs::path& out_dir,
                                const BuildDatasetOptions& options) {
    RunManifest manifest = start_manifest("build-dataset", &config);
    std::vector<InstructionTriplet> triplets;
    for_each_json_line(triplets_path, [&](const json& j, std::size_t) { triplets.push_back(triplet_from_json(j)); });
    const std::size_t total = triplets.size();

    std::vector<std::string> quarantine;
    auto quarantine_line = [](const InstructionTriplet& t, const std::string& reason) {
        ordered_json q;
        q["id"] = t.cot.post.id;
        q["category"] = std::string(to_string(t.cot.post.category));
        q["reason"] = reason;
        q["output"] = t.output;
        return dump_line(q);
    };

    corpus::FilterResult filtered = corpus::filter_high_risk(std::move(triplets), config.filter_patterns);
    for (const auto& t : filtered.removed) quarantine.push_back(quarantine_line(t, "refusal"));

    std::size_t removed_audit = 0;
    std::vector<InstructionTriplet> kept;
    if (config.audit_endpoint) {
        require_credentials(config, {*config.audit_endpoint});
        auto gw = make_gateway(config, options.seed);
        const auto& endpoint = config.endpoint(*config.audit_endpoint);
        std::vector<std::string> verdicts(filtered.kept.size());  // empty = clean
        parallel_for(filtered.kept.size(), options.workers, [&](std::size_t i) {
            const InstructionTriplet& t = filtered.kept[i];
            try {
                const auto v = corpus::semantic_audit(corpus::strip_cot(t, config.instruction), *gw, endpoint,
                                                      config.audit_prompt);
                if (v.flagged) verdicts[i] = "audit: " + v.reason.value_or("unspecified");
            } catch (const gateway::AuthError&) {
                throw;
            } catch (const corpus::AuditParseError& e) {
                verdicts[i] = std::string("audit-unreadable: ") + e.what();
            } catch (const gateway::GatewayError& e) {
                verdicts[i] = std::string("audit-error: ") + e.what();
            }
        });
        for (std::size_t i = 0; i < filtered.kept.size(); ++i) {
            if (verdicts[i].empty()) {
                kept.push_back(std::move(filtered.kept[i]));
                continue;
            }
            ++removed_audit;
            quarantine.push_back(quarantine_line(filtered.kept[i], verdicts[i]));
            if (verdicts[i].rfind("audit:", 0) != 0) {
                manifest.failures.push_back(
                    ordered_json{{"post_id", filtered.kept[i].cot.post.id}, {"reason", verdicts[i]}});
            }
        }
    } else {
        kept = std::move(filtered.kept);
    }

    const corpus::CorpusStats stats = corpus::compute_stats(total, filtered.removed.size(), removed_audit);
    std::vector<corpus::DatasetEntry> entries;
    std::set<std::string> ids;
    for (const auto& t : kept) {
        if (!ids.insert(t.cot.post.id).second) throw corpus::DuplicateIdError(t.cot.post.id, 0);
        entries.push_back({t.cot.post.id, t.cot.post.category, corpus::strip_cot(t, config.instruction)});
    }
    const corpus::Split split = corpus::split_dataset(std::move(entries), {config.train_fraction, options.seed});
    const std::size_t per_category = options.per_category.value_or(config.per_category);
    std::vector<corpus::DatasetEntry> core;
    if (per_category > 0) {
        core = corpus::stratified_sample(split.test, per_category, derive_seed(options.seed, "core-set"));
    }

    fs::create_directories(out_dir);
    auto write_lines = [](const fs::path& p, const std::vector<std::string>& lines) {
        PartialWriter w(p);
        for (const auto& l : lines) w.write_line(l);
        w.commit();
    };
    std::vector<std::string> train_lines, test_lines, core_lines;
    for (const auto& e : split.train) train_lines.push_back(corpus::record_line(e.record));
    for (const auto& e : split.test) test_lines.push_back(corpus::record_line(e.record));
    for (const auto& e : core) core_lines.push_back(corpus::case_line(e));
    write_lines(out_dir / "train.jsonl", train_lines);
    write_lines(out_dir / "test.jsonl", test_lines);
    write_lines(out_dir / "core_set.jsonl", core_lines);
    write_lines(out_dir / "quarantine.jsonl", quarantine);
    write_file_atomic(out_dir / "train.json", corpus::records_array(split.train).dump(2) + "\n");
    write_file_atomic(out_dir / "training_config.json", corpus::training_config_metadata().dump(2) + "\n");

    ordered_json sj;
    sj["total_in"] = stats.total_in;
    sj["removed_refusal"] = stats.removed_refusal;
    sj["removed_audit"] = stats.removed_audit;
    sj["kept"] = stats.kept;
    sj["exclusion_rate"] = stats.exclusion_rate;
    sj["train"] = split.train.size();
    sj["test"] = split.test.size();
    sj["core_set"] = core.size();
    ordered_json core_counts = ordered_json::object();
    for (TopicCategory c : kAllCategories) {
        const auto n = std::count_if(core.begin(), core.end(), [c](const auto& e) { return e.category == c; });
        core_counts[std::string(to_string(c))] = n;
    }
    sj["core_set_per_category"] = core_counts;
    write_file_atomic(out_dir / "stats.json", sj.dump(2) + "\n");

    manifest.inputs["triplets"] = triplets_path.string();
    for (const char* name : {"train.jsonl", "test.jsonl", "core_set.jsonl", "quarantine.jsonl", "train.json",
                             "training_config.json", "stats.json"}) {
        manifest.outputs[name] = (out_dir / name).string();
    }
    manifest.counts["total_in"] = stats.total_in;
    manifest.counts["removed_refusal"] = stats.removed_refusal;
    manifest.counts["removed_audit"] = stats.removed_audit;
    manifest.counts["kept"] = stats.kept;
    manifest.counts["train"] = split.train.size();
    manifest.counts["test"] = split.test.size();
    manifest.counts["core_set"] = core.size();
    manifest.seeds["seed"] = options.seed;
    manifest.seeds["core_set_seed"] = derive_seed(options.seed, "core-set");
    manifest.options = ordered_json{{"workers", options.workers},
                                    {"strict", options.strict},
                                    {"train_fraction", config.train_fraction},
                                    {"per_category", per_category},
                                    {"audit_endpoint", config.audit_endpoint ? ordered_json(*config.audit_endpoint)
                                                                             : ordered_json(nullptr)}};
    const int code = options.strict && !manifest.failures.empty() ? exit_code::job_failures : exit_code::ok;
    return finish(std::move(manifest), out_dir / "manifest.json", code);
}

CommandResult cmd_eval_auto(const RunConfig* config, const fs::path& pairs_path, const fs::path& out_dir,
                            const EvalAutoOptions& options) {
    RunManifest manifest = start_manifest("eval-auto", config);
    const auto pairs = metrics::load_pairs(pairs_path);
    metrics::MetricOptions mopts = config != nullptr ? config->metrics : metrics::MetricOptions{};
    mopts.workers = options.workers;

    std::unique_ptr<metrics::EmbeddingProvider> provider;
    if (!options.no_embedder && config != nullptr) {
        if (config->embedder.kind == EmbedderConfig::Kind::Toy) {
            provider = std::make_unique<metrics::ToyHashProvider>(config->embedder.dimension);
        } else if (config->embedder.kind == EmbedderConfig::Kind::Http) {
            if (config->gateway.stub_only) {
                throw ConfigError("the HTTP embedder needs network access; pass --no-embedder under NO_NETWORK=1");
            }
            require_credentials(*config, {config->embedder.endpoint_id});
            provider = std::make_unique<metrics::HttpEmbeddingProvider>(config->endpoint(config->embedder.endpoint_id));
        }
    }
    const metrics::MetricReport report = metrics::evaluate_corpus(pairs, provider.get(), mopts);
    const std::string table = metrics::render_metric_table({{options.system_name, report}});
    ordered_json j;
    j["system"] = options.system_name;
    j.update(metrics::report_to_json(report, mopts, provider ? provider->name() : std::string()));
    j["table"] = table;

    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "metrics.json", j.dump(2) + "\n");
    write_file_atomic(out_dir / "metrics.md", table);
    manifest.inputs["pairs"] = pairs_path.string();
    manifest.outputs["metrics.json"] = (out_dir / "metrics.json").string();
    manifest.outputs["metrics.md"] = (out_dir / "metrics.md").string();
    manifest.counts["pairs"] = pairs.size();
    manifest.options = ordered_json{{"system", options.system_name},
                                    {"no_embedder", options.no_embedder},
                                    {"workers", options.workers}};
    return finish(std::move(manifest), out_dir / "manifest.json", exit_code::ok);
}

std::map<std::string, std::string> load_responses(const fs::path& path) {
    std::map<std::string, std::string> out;
    for_each_json_line(path, [&](const json& j, std::size_t line) {
        const std::string id = j.at("id").get<std::string>();
        std::string text;
        for (const char* key : {"response", "output", "candidate"}) {
            if (j.contains(key)) {
                text = j.at(key).get<std::string>();
                break;
            }
        }
        if (!out.emplace(id, text).second) throw corpus::DuplicateIdError(id, line);
    });
    return out;
}

CommandResult cmd_eval_judge(const RunConfig& config, const fs::path& cases_path,
                             const std::vector<SystemResponses>& systems, const fs::path& out_dir,
                             const EvalJudgeOptions& options) {
    RunManifest manifest = start_manifest("eval-judge", &config);
    if (config.judge_panel.empty()) throw ConfigError("judge.panel is empty");
    if (systems.empty()) throw ConfigError("at least one system is required");

    std::vector<judge::JudgeCase> cases;
    for_each_json_line(cases_path, [&](const json& j, std::size_t) {
        judge::JudgeCase c;
        c.case_id = j.at("id").get<std::string>();
        c.post = j.contains("input") ? j.at("input").get<std::string>() : j.at("post").get<std::string>();
        cases.push_back(std::move(c));
    });
    if (options.limit && cases.size() > *options.limit) cases.resize(*options.limit);

    std::vector<std::string> redact_terms = config.redact_terms;
    for (const auto& s : systems) {
        const auto responses = load_responses(s.path);
        std::vector<std::string> missing;
        for (auto& c : cases) {
            auto it = responses.find(c.case_id);
            if (it == responses.end()) missing.push_back(c.case_id);
            else c.responses[s.name] = it->second;
        }
        if (!missing.empty()) throw CoverageError(s.name, missing);
        redact_terms.push_back(s.name);
        manifest.inputs["system:" + s.name] = s.path.string();
    }
    require_credentials(config, config.judge_panel);

    const judge::RubricSet rubrics =
        config.rubric_dir ? judge::RubricSet::load_directory(*config.rubric_dir) : judge::RubricSet();
    judge::JudgeConfig jc;
    jc.panel = config.judge_panel;
    jc.mode = config.judge_mode;
    jc.dimensions = config.judge_dimensions;
    jc.seed = options.seed;
    jc.redact_terms = redact_terms;
    jc.workers = options.workers;

    auto gw = make_gateway(config, options.seed);
    const judge::JudgeRun run = judge::run_judging(cases, jc, *gw, config.routing(), rubrics);

    judge::ReportOptions ro;
    ro.reference_system = options.reference_system.value_or(
        config.reference_system.empty() ? systems.front().name : config.reference_system);
    ro.alpha = config.alpha;
    ro.exact_cutoff = config.exact_cutoff;
    ro.tie_mode = config.tie_mode;
    const ordered_json report = judge::build_judge_report(run, jc, ro);

    fs::create_directories(out_dir);
    {
        PartialWriter w(out_dir / "scores.jsonl");
        for (const auto& s : run.sheets) w.write_line(dump_line(judge::to_json(s)));
        w.commit();
    }
    write_file_atomic(out_dir / "judge_report.json", report.dump(2) + "\n");
    std::string md;
    for (const auto& [name, table] : report["tables"].items()) md += "## " + name + "\n\n" + table.get<std::string>() + "\n";
    write_file_atomic(out_dir / "judge_report.md", md);

    manifest.inputs["cases"] = cases_path.string();
    manifest.outputs["scores.jsonl"] = (out_dir / "scores.jsonl").string();
    manifest.outputs["judge_report.json"] = (out_dir / "judge_report.json").string();
    manifest.outputs["judge_report.md"] = (out_dir / "judge_report.md").string();
    manifest.counts["cases"] = cases.size();
    manifest.counts["systems"] = systems.size();
    manifest.counts["sheets"] = run.sheets.size();
    manifest.counts["gaps"] = run.gaps.size();
    for (const auto& g : run.gaps) {
        manifest.failures.push_back(ordered_json{{"case_id", g.case_id},
                                                 {"judge_id", g.judge_id},
                                                 {"dimension", std::string(judge::to_string(g.dimension))},
                                                 {"reason", g.reason}});
    }
    manifest.seeds["seed"] = options.seed;
    manifest.options = ordered_json{{"workers", options.workers},
                                    {"strict", options.strict},
                                    {"mode", std::string(judge::to_string(config.judge_mode))},
                                    {"reference_system", ro.reference_system}};
    const int code = options.strict && !run.gaps.empty() ? exit_code::job_failures : exit_code::ok;
    return finish(std::move(manifest), out_dir / "manifest.json", code);
}

TraceCheck cmd_validate_trace(const fs::path& path, const std::string& need_prefix) {
    TraceCheck check;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::is_blank(line)) continue;
        ++check.records;
        const std::string where = "line " + std::to_string(number);
        try {
            const json j = json::parse(line);
            const ReasoningTrace trace = j.contains("cot") ? triplet_from_json(j).cot : trace_from_json(j);
            const ValidationReport report = validate_trace(trace, need_prefix);
            if (report.ok()) continue;
            ++check.invalid;
            for (const auto& v : report.violations) {
                check.messages.push_back(where + " (" + trace.post.id + "): " + std::string(to_string(v.stage)) +
                                         " " + v.rule + ": " + v.detail);
            }
        } catch (const std::exception& e) {
            ++check.invalid;
            check.messages.push_back(where + ": " + e.what());
        }
    }
    return check;
}

std::string cmd_report(const std::vector<fs::path>& metric_reports, const std::vector<fs::path>& score_files,
                       const std::string& reference_system, double alpha, std::size_t exact_cutoff) {
    std::string out;
    if (!metric_reports.empty()) {
        std::vector<std::pair<std::string, metrics::MetricReport>> rows;
        for (const auto& p : metric_reports) {
            const json j = json::parse(read_file(p), nullptr, false);
            if (j.is_discarded()) throw IoError(p.string() + " is not valid JSON");
            metrics::MetricReport r;
            try {
                r.meteor = j.at("meteor").get<double>();
                r.bleu1 = j.at("bleu1").get<double>();
                r.bleu2 = j.at("bleu2").get<double>();
                r.bleu3 = j.at("bleu3").get<double>();
                r.rouge_l = j.at("rouge_l").get<double>();
                r.distinct1 = j.at("distinct1").get<double>();
                r.distinct2 = j.at("distinct2").get<double>();
                r.distinct3 = j.at("distinct3").get<double>();
                if (j.contains("bert_score") && !j["bert_score"].is_null()) r.bert_score = j["bert_score"].get<double>();
                r.sample_count = j.value("sample_count", std::size_t{0});
            } catch (const json::exception& e) {
                throw IoError(p.string() + ": " + e.what());
            }
            rows.emplace_back(j.value("system", p.stem().string()), r);
        }
        out += "## Automated metrics\n\n" + metrics::render_metric_table(rows) + "\n";
    }
    if (!score_files.empty()) {
        std::vector<judge::ScoreSheet> sheets;
        for (const auto& p : score_files) {
            auto s = judge::load_score_sheets(p);
            sheets.insert(sheets.end(), s.begin(), s.end());
        }
        const auto systems = judge::systems_in(sheets, reference_system);
        const judge::PanelMeans means = judge::aggregate_panel(sheets);
        std::vector<judge::Dimension> eft, general, all;
        for (judge::Dimension d : judge::kAllDimensions) {
            if (!means.count(d)) continue;
            all.push_back(d);
            const bool is_eft =
                std::find(judge::kEftDimensions.begin(), judge::kEftDimensions.end(), d) != judge::kEftDimensions.end();
            (is_eft ? eft : general).push_back(d);
        }
        if (!eft.empty()) out += "## EFT dimensions\n\n" + judge::render_dimension_rows(means, eft, systems) + "\n";
        if (!general.empty()) {
            out += "## Counseling dimensions\n\n" + judge::render_system_rows(means, general, systems) + "\n";
        }
        const auto matrix =
            judge::significance_matrix(judge::case_scores(sheets, all), systems, alpha, exact_cutoff);
        out += "## Significance (one-sided Wilcoxon, alpha " + [&] {
            std::ostringstream s;
            s << alpha;
            return s.str();
        }() + ")\n\n" + judge::render_significance(matrix);
    }
    return out;
}

} // namespace eftcot::workbench

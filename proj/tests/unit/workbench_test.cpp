#include <doctest.h>

#include <cstdlib>

#include "eftcot/corpus/dataset.hpp"
#include "eftcot/corpus/ingest.hpp"
#include "eftcot/gateway/types.hpp"
#include "eftcot/judge/rubric.hpp"
#include "eftcot/workbench/commands.hpp"
#include "eftcot/workbench/config.hpp"
#include "eftcot/workbench/manifest.hpp"
#include "support/fixtures.hpp"

using namespace eftcot;
using namespace eftcot::workbench;
namespace fs = std::filesystem;

namespace {

RunConfig demo_config() { return load_run_config(fixtures::config_dir() / "demo.json"); }

fs::path sample(const std::string& name) { return fixtures::config_dir() / "samples" / name; }

bool has_problem(const ConfigValidationError& e, const std::string& needle) {
    for (const auto& p : e.problems()) {
        if (p.find(needle) != std::string::npos) return true;
    }
    return false;
}

} // namespace

TEST_SUITE("workbench") {

TEST_CASE("shipped configs load") {
    const auto demo = demo_config();
    CHECK(demo.gateway.stub_only);
    REQUIRE(demo.stub_script);
    CHECK(fs::exists(*demo.stub_script));
    CHECK(demo.judge_panel == std::vector<std::string>{"gpt-4o", "claude-judge"});
    CHECK(demo.embedder.kind == EmbedderConfig::Kind::Toy);
    CHECK(demo.sha256.size() == 64);
    CHECK(demo.routes.size() == 9);

    const auto live = load_run_config(fixtures::config_dir() / "eftcot.json");
    CHECK(live.per_category == 20);
    CHECK(live.train_fraction == doctest::Approx(0.9));
    CHECK(live.judge_panel.size() == 3);
    CHECK(live.pipeline.thresholds.empathy == doctest::Approx(0.5));
    CHECK(live.embedder.kind == EmbedderConfig::Kind::Http);
    for (const auto& e : live.endpoints) {
        CHECK_FALSE(e.auth_env_var.empty());
        CHECK(e.params.temperature == doctest::Approx(0.01));
        CHECK(e.params.top_p == doctest::Approx(0.7));
        CHECK(e.params.max_tokens == 1500);
    }
}

TEST_CASE("config problems are collected and reported together") {
    fixtures::TempDir dir;
    const auto path = dir.path() / "bad.json";
    fixtures::write_text(path, R"({
      "endpoints": [{"id": "m", "base_url": "https://x.invalid/v1", "model": "m", "auth_env": "K"}],
      "routing": {"Romance": "nobody", "Atlantis": "m"},
      "retry": {"jitter": 2.0},
      "pipeline": {"prompt_dir": "missing-prompts"},
      "dataset": {"instruction": "x", "train_fraction": 1.5},
      "judge": {"panel": ["ghost"], "alpha": 0}
    })");
    try {
        load_run_config(path);
        FAIL("expected ConfigValidationError");
    } catch (const ConfigValidationError& e) {
        CHECK(has_problem(e, "Atlantis"));
        CHECK(has_problem(e, "retry.jitter"));
        CHECK(has_problem(e, "pipeline.prompt_dir"));
        CHECK(has_problem(e, "dataset.train_fraction"));
        CHECK(has_problem(e, "judge.panel"));
        CHECK(has_problem(e, "judge.alpha"));
        CHECK(e.problems().size() >= 6);
        CHECK(exit_code_for(e) == exit_code::config);
    }
    fixtures::write_text(path, "{ not json");
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    CHECK_THROWS_AS(load_run_config(dir.path() / "absent.json"), Error);
}

TEST_CASE("credentials are looked up by variable name only") {
    ::unsetenv("OPENAI_API_KEY");
    const auto live = load_run_config(fixtures::config_dir() / "eftcot.json");
    if (!live.gateway.stub_only) {
        CHECK(missing_credentials(live, {"gpt-4o"}) == std::vector<std::string>{"OPENAI_API_KEY (endpoint gpt-4o)"});
        ::setenv("OPENAI_API_KEY", "x", 1);
        CHECK(missing_credentials(live, {"gpt-4o"}).empty());
        ::unsetenv("OPENAI_API_KEY");
    }
    CHECK(missing_credentials(demo_config(), {"gpt-4o"}).empty());
    CHECK(read_file(fixtures::config_dir() / "eftcot.json").find("sk-") == std::string::npos);
}

TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("partial writer commits atomically and resumes complete lines") {
    fixtures::TempDir dir;
    const auto out = dir.path() / "out.jsonl";
    {
        PartialWriter w(out);
        w.write_line("one");
        CHECK(fs::exists(partial_path(out)));
        CHECK_FALSE(fs::exists(out));
        w.commit();
    }
    CHECK(fixtures::read_text(out) == "one\n");
    {
        PartialWriter w(out);
        w.write_line("lost");
    }
    CHECK(fixtures::read_text(out) == "one\n");
    fixtures::write_text(partial_path(out), "one\ntwo\nthr");
    {
        PartialWriter w(out, true);
        CHECK(w.carried_lines() == std::vector<std::string>{"one", "two"});
        w.write_line("three");
        w.commit();
    }
    CHECK(fixtures::read_lines(out) == std::vector<std::string>{"one", "two", "three"});
    write_file_atomic(dir.path() / "x.txt", "hello");
    CHECK(fixtures::read_text(dir.path() / "x.txt") == "hello");
    CHECK(utc_timestamp().size() == 20);
}

TEST_CASE("exit codes by error family") {
    CHECK(exit_code_for(ConfigError("x")) == exit_code::config);
    CHECK(exit_code_for(gateway::AuthError("x")) == exit_code::config);
    CHECK(exit_code_for(CoverageError("s", {"c1"})) == exit_code::config);
    CHECK(exit_code_for(judge::RubricError("x")) == exit_code::config);
    CHECK(exit_code_for(IoError("x")) == exit_code::io);
    CHECK(exit_code_for(FormatError("a1", "x")) == exit_code::io);
    CHECK(exit_code_for(std::runtime_error("x")) == exit_code::job_failures);
}

TEST_CASE("demo chain: synthesize, validate, build, evaluate, judge, report") {
    fixtures::TempDir dir;
    const auto cfg = demo_config();
    const auto triplets = dir.path() / "triplets.jsonl";

    const auto syn = cmd_synthesize(cfg, sample("corpus.jsonl"), triplets, {7, 2, false, true, std::nullopt});
    CHECK(syn.exit_code == 0);
    CHECK(syn.manifest.counts.at("succeeded") == 3);
    CHECK(syn.manifest.failures.empty());
    CHECK(fs::exists(triplets.string() + ".manifest.json"));
    CHECK(fixtures::read_lines(triplets).size() == 3);

    const auto again = cmd_synthesize(cfg, sample("corpus.jsonl"), triplets, {7, 1, true, false, std::nullopt});
    CHECK(again.manifest.counts.at("skipped_existing") == 3);
    CHECK(again.manifest.counts.at("processed") == 0);
    CHECK(fixtures::read_lines(triplets).size() == 3);

    const auto check = cmd_validate_trace(triplets, "I need");
    CHECK(check.records == 3);
    CHECK(check.invalid == 0);

    const auto ds_dir = dir.path() / "dataset";
    const auto ds = cmd_build_dataset(cfg, triplets, ds_dir, {7, 1, false, std::nullopt});
    CHECK(ds.exit_code == 0);
    CHECK(ds.manifest.counts.at("kept") == 3);
    CHECK(ds.manifest.counts.at("train") == corpus::train_size(3, 0.9));
    for (const char* f : {"train.jsonl", "test.jsonl", "core_set.jsonl", "quarantine.jsonl", "train.json",
                          "training_config.json", "stats.json", "manifest.json"}) {
        CHECK(fs::exists(ds_dir / f));
    }
    const auto record = json::parse(fixtures::read_lines(ds_dir / "train.jsonl").front());
    CHECK(record.contains("instruction"));
    CHECK(record.contains("input"));
    CHECK(record.contains("output"));
    CHECK_FALSE(record.contains("cot"));
    CHECK_THROWS_AS(cmd_build_dataset(cfg, triplets, ds_dir, {7, 1, false, 20}), corpus::InsufficientStratumError);

    const auto auto_dir = dir.path() / "auto";
    const auto ev = cmd_eval_auto(&cfg, sample("pairs.jsonl"), auto_dir, {"base", false, 1});
    CHECK(ev.exit_code == 0);
    const auto md = fixtures::read_text(auto_dir / "metrics.md");
    CHECK(md.find("| base |") != std::string::npos);
    const auto mj = json::parse(fixtures::read_text(auto_dir / "metrics.json"));
    CHECK(mj["bert_score"].is_number());
    const auto no_emb = cmd_eval_auto(nullptr, sample("pairs.jsonl"), dir.path() / "auto2", {"base", true, 1});
    CHECK(json::parse(fixtures::read_text(dir.path() / "auto2" / "metrics.json"))["bert_score"].is_null());
    CHECK(no_emb.exit_code == 0);

    const auto judge_dir = dir.path() / "judge";
    const std::vector<SystemResponses> systems = {{"eft", sample("responses_eft.jsonl")},
                                                  {"base", sample("responses_base.jsonl")}};
    const auto jr = cmd_eval_judge(cfg, sample("cases.jsonl"), systems, judge_dir, {7, 2, true, std::nullopt, std::nullopt});
    CHECK(jr.exit_code == 0);
    CHECK(jr.manifest.counts.at("gaps") == 0);
    CHECK(jr.manifest.counts.at("sheets") == 3 * 2 * 9);
    const auto report = json::parse(fixtures::read_text(judge_dir / "judge_report.json"));
    CHECK(report["reference_system"] == "eft");
    CHECK(report["win_rates"]["against"]["base"]["win_rate"].get<double>() == 1.0);

    const std::string combined =
        cmd_report({auto_dir / "metrics.json"}, {judge_dir / "scores.jsonl"}, "eft", 0.05, 25);
    CHECK(combined.find("| System | METEOR |") != std::string::npos);
    CHECK(combined.find("| Somatic Awareness | 5.00 | 2.00 |") != std::string::npos);
    CHECK(combined.find("| eft | 5.00 | 5.00 | 5.00 | 5.00 | 5.00 |") != std::string::npos);
}

TEST_CASE("judging requires every system to cover every case") {
    fixtures::TempDir dir;
    const auto partial = dir.path() / "partial.jsonl";
    fixtures::write_text(partial, fixtures::read_lines(sample("responses_base.jsonl")).front() + "\n");
    const std::vector<SystemResponses> systems = {{"eft", sample("responses_eft.jsonl")}, {"base", partial}};
    try {
        cmd_eval_judge(demo_config(), sample("cases.jsonl"), systems, dir.path() / "j", {1, 1, false, std::nullopt, std::nullopt});
        FAIL("expected CoverageError");
    } catch (const CoverageError& e) {
        CHECK(e.system() == "base");
        CHECK(e.missing().size() == 2);
    }
}

TEST_CASE("stub-only runs need a script") {
    auto cfg = demo_config();
    cfg.stub_script.reset();
    fixtures::TempDir dir;
    CHECK_THROWS_AS(cmd_synthesize(cfg, sample("corpus.jsonl"), dir.path() / "t.jsonl", {1, 1, false, false, std::nullopt}),
                    ConfigError);
}

TEST_CASE("responses files reject duplicate ids") {
    fixtures::TempDir dir;
    const auto p = dir.path() / "r.jsonl";
    fixtures::write_text(p, R"({"id":"a","response":"x"})" "\n" R"({"id":"a","response":"y"})" "\n");
    CHECK_THROWS_AS(load_responses(p), corpus::DuplicateIdError);
    fixtures::write_text(p, R"({"id":"a","output":"x"})" "\n" R"({"id":"b","candidate":"y"})" "\n");
    CHECK(load_responses(p) == std::map<std::string, std::string>{{"a", "x"}, {"b", "y"}});
}

TEST_CASE("validate-trace flags broken records") {
    fixtures::TempDir dir;
    auto t = fixtures::confession_trace();
    t.a6->explicit_statement = "Acceptance, please";
    const auto p = dir.path() / "t.jsonl";
    fixtures::write_text(p, dump_line(to_json(fixtures::confession_trace())) + "\n" + dump_line(to_json(t)) + "\n");
    const auto check = cmd_validate_trace(p, "I need");
    CHECK(check.records == 2);
    CHECK(check.invalid == 1);
    CHECK_FALSE(check.messages.empty());
}

}

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "eftcot/core/trace_validation.hpp"
#include "eftcot/core/unicode.hpp"
#include "eftcot/corpus/dataset.hpp"
#include "eftcot/corpus/filtering.hpp"
#include "eftcot/corpus/ingest.hpp"
#include "eftcot/gateway/stub_transport.hpp"
#include "eftcot/judge/blinding.hpp"
#include "eftcot/judge/harness.hpp"
#include "eftcot/judge/report.hpp"
#include "eftcot/judge/stats.hpp"
#include "eftcot/metrics/embedding.hpp"
#include "eftcot/metrics/report.hpp"
#include "eftcot/metrics/text_metrics.hpp"
#include "eftcot/pipeline/anchors.hpp"
#include "eftcot/pipeline/pipeline.hpp"
#include "eftcot/workbench/commands.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace eftcot;
namespace fs = std::filesystem;

namespace {

/// Collects failed expectations for one criterion.
struct Checks {
    std::vector<std::string> failures;
    std::string note;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 8) failures.push_back(what);
        else if (!ok) failures.back() = "... and more";
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream s;
        s.precision(17);
        s << what << ": got " << got << ", want " << want;
        expect(std::fabs(got - want) <= tol, s.str());
    }
};

int g_failed = 0;

void criterion(int number, const std::string& title, const std::function<void(Checks&)>& body) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = c.failures.empty();
    if (!ok) ++g_failed;
    std::printf("[%s] %2d %s (%.2fs%s%s)\n", ok ? "PASS" : "FAIL", number, title.c_str(), secs,
                c.note.empty() ? "" : "; ", c.note.c_str());
    for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
    std::fflush(stdout);
}

metrics::TokenSeq seq(const oracle::Tokens& t) { return t.empty() ? metrics::TokenSeq() : metrics::TokenSeq(t); }

// ---------------------------------------------------------------- anchors

struct AnchorCase {
    std::string name;
    std::vector<std::string> quotes;
    std::string metaphor;
    std::string narrative;
    std::string quote_sentence;
    std::string metaphor_sentence;
    std::string narrative_sentence;
    std::string quote_paraphrase;
    std::string metaphor_filler;
    std::string narrative_filler;
    std::array<std::string, 4> closers;
};

std::vector<AnchorCase> anchor_cases() {
    const std::array<std::string, 4> en = {
        "Take a slow walk tomorrow and make yourself a warm cup of tea.",
        "Tonight, maybe put on some music you enjoy and rest early.",
        "Write down one small thing that went well today.",
        "If it helps, text a friend you trust and plan a simple lunch.",
    };
    const std::array<std::string, 4> zh = {
        "明天可以出去散散步，给自己泡一杯热茶。",
        "今晚听听喜欢的音乐，早点休息。",
        "写下今天一件做得不错的小事。",
        "如果愿意，约一个信任的朋友吃顿简单的午饭。",
    };
    return {
        {"confession",
         {"unbearable past I had never told anyone"},
         "a bucket of ice water poured over my head",
         "Sharing a hidden secret takes courage, and her reaction shows her own capacity, not whether you deserve love.",
         "You wrote about an unbearable past I had never told anyone, and I can tell what it cost to say it.",
         "It sounds like a bucket of ice water poured over your head.",
         "Sharing a hidden secret takes courage, and her reaction shows her own capacity, not whether you deserve love.",
         "What you went through sounds really hard.",
         "Let us slow down for a moment.",
         "There is no rush to figure anything out tonight.",
         en},
        {"report",
         {"criticized my report in front of the whole team"},
         "a knot pulling tight in my stomach",
         "One harsh review cannot measure your ability; three sleepless nights show how deeply you care about doing good work.",
         "Your manager criticized my report in front of the whole team, you said, and that stung.",
         "That knot pulling tight in your stomach each morning makes sense.",
         "One harsh review cannot measure your ability; three sleepless nights show how deeply you care about doing good work.",
         "That meeting sounds painful to sit through.",
         "Let us slow down for a moment.",
         "There is no rush to figure anything out tonight.",
         en},
        {"dinner",
         {"compares me with my cousin at every dinner"},
         "a heavy stone pressing on my chest",
         "Your mother's comparisons speak to her worries rather than your value; the care you give her already counts.",
         "You said she compares me with my cousin at every dinner, and you keep smiling through it.",
         "It is like a heavy stone pressing on your chest at night.",
         "Your mother's comparisons speak to her worries rather than your value; the care you give her already counts.",
         "Those family meals sound exhausting.",
         "Let us slow down for a moment.",
         "There is no rush to figure anything out tonight.",
         en},
        {"apology",
         {"直接指责", "怕打扰她"},
         "一盆冰水浇在头上",
         "分享秘密是信任和勇气的试金石，她的反应反映的是她的承受力，而不是你的过去决定你的未来。",
         "你说她直接指责了你，你现在又怕打扰她。",
         "那一刻就像一盆冰水浇在头上。",
         "分享秘密是信任和勇气的试金石，她的反应反映的是她的承受力，而不是你的过去决定你的未来。",
         "这段经历听起来真的很难受。",
         "我们先慢下来一会儿。",
         "今晚不用急着想清楚任何事。",
         zh},
        {"workplace",
         {"在全组面前批评", "整晚睡不着"},
         "胸口压着一块石头",
         "一次批评针对的是方案，不是你这个人；你愿意熬夜打磨，说明你重视自己的工作，这份认真本身就值得肯定。",
         "你提到领导在全组面前批评，你整晚睡不着。",
         "听起来胸口压着一块石头，喘不过气。",
         "一次批评针对的是方案，不是你这个人；你愿意熬夜打磨，说明你重视自己的工作，这份认真本身就值得肯定。",
         "那次会议听起来很不好受。",
         "我们先慢下来一会儿。",
         "今晚不用急着想清楚任何事。",
         zh},
    };
}

std::string join(const std::vector<std::string>& parts, bool cjk) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() || cjk ? "" : " ") + p;
    return out;
}

// ---------------------------------------------------------------- report data

struct Column {
    std::string system;
    std::vector<double> values;
};

/// 100 integer-scored cases per (system, dimension) whose mean is exactly `value`.
std::vector<judge::ScoreSheet> sheets_for(const std::vector<Column>& cols, const std::vector<judge::Dimension>& dims) {
    std::vector<judge::ScoreSheet> out;
    for (const auto& col : cols) {
        for (std::size_t d = 0; d < dims.size(); ++d) {
            const long cents = std::lround(col.values[d] * 100.0);
            const int base = static_cast<int>(cents / 100);
            const long ups = cents % 100;
            for (int i = 0; i < 100; ++i) {
                out.push_back({"case" + std::to_string(i), "judge", dims[d],
                               {{col.system, i < ups ? base + 1 : base}}});
            }
        }
    }
    return out;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// ---------------------------------------------------------------- determinism

void strip_volatile(json& j) {
    if (j.is_object()) {
        for (const char* k : {"started_ms", "wall_ms", "started_at", "finished_at"}) j.erase(k);
        for (auto& [k, v] : j.items()) strip_volatile(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip_volatile(v);
    }
}

std::string comparable_content(const fs::path& p) {
    const std::string raw = fixtures::read_text(p);
    const auto ext = p.extension().string();
    if (ext != ".json" && ext != ".jsonl") return raw;
    std::string out;
    std::istringstream in(raw);
    if (ext == ".json") {
        json j = json::parse(raw);
        strip_volatile(j);
        return j.dump();
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        strip_volatile(j);
        out += j.dump() + "\n";
    }
    return out;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = comparable_content(e.path());
    }
    return out;
}

void run_chain(const workbench::RunConfig& cfg, const fs::path& dir) {
    const fs::path samples = fixtures::config_dir() / "samples";
    const auto triplets = dir / "triplets.jsonl";
    workbench::cmd_synthesize(cfg, samples / "corpus.jsonl", triplets, {42, 2, false, true, std::nullopt});
    workbench::cmd_build_dataset(cfg, triplets, dir / "dataset", {42, 2, true, std::nullopt});
    workbench::cmd_eval_auto(&cfg, samples / "pairs.jsonl", dir / "auto", {"base", false, 2});
}

} // namespace

int main() {
    // ------------------------------------------------------------------ 1
    criterion(1, "stub pipeline on the confession post: Ok, valid trace, all anchors", [](Checks& c) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto cfg = workbench::load_run_config(fixtures::config_dir() / "demo.json");
        c.expect(cfg.gateway.stub_only, "NO_NETWORK/demo config must force stub-only mode");
        const auto posts = corpus::ingest_corpus(fixtures::config_dir() / "samples" / "confession_post.jsonl");
        c.expect(posts.size() == 1, "one confession post");
        auto stub = std::make_shared<gateway::StubTransport>(
            gateway::load_stub_script(fixtures::config_dir() / "stub" / "confession.jsonl"));
        gateway::Gateway gw(cfg.gateway, nullptr, stub, [](std::chrono::milliseconds) {});
        const auto prompts = pipeline::PromptSet::load_directory(cfg.prompt_dir);
        const auto routing = cfg.routing();
        pipeline::PipelineContext ctx{gw, routing, prompts, cfg.pipeline};
        const auto run = pipeline::run_pipeline(posts.at(0), ctx);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(run.status.ok, "status Ok, got: " + run.status.reason);
        const auto report = validate_trace(run.trace, cfg.pipeline.need_prefix);
        c.expect(report.violations.empty(), std::to_string(report.violations.size()) + " violation(s)");
        c.expect(run.anchor_report.context_ok, "context anchor");
        c.expect(run.anchor_report.empathy_ok, "empathy anchor");
        c.expect(run.anchor_report.logic_ok, "logic anchor");
        c.expect(secs < 5.0, "wall time under 5 s");
        c.note = "stub calls " + std::to_string(stub->calls());
    });

    // ------------------------------------------------------------------ 2
    criterion(2, "mutation fixtures fail exactly the mutated anchor", [](Checks& c) {
        const pipeline::AnchorThresholds th{0.5, 0.15};
        int fixtures_run = 0;
        for (const auto& ac : anchor_cases()) {
            const bool cjk = text::is_cjk(text::decode_utf8(ac.quotes.front()).front());
            ReasoningTrace trace;
            trace.a7 = NarrativeFrame{"", ac.narrative, ac.quotes, ac.metaphor, ""};
            for (std::size_t v = 0; v < ac.closers.size(); ++v) {
                const std::string tag = ac.name + "/" + std::to_string(v);
                const std::vector<std::string> base = {ac.quote_sentence, ac.metaphor_sentence, ac.narrative_sentence,
                                                       ac.closers[v]};
                const auto ok = pipeline::verify_anchors({join(base, cjk)}, trace, th);
                c.expect(ok.passed, tag + " unmutated response should pass (" + ok.first_failure() + ")");
                for (int m = 0; m < 3; ++m) {
                    auto parts = base;
                    if (m == 0) parts[0] = ac.quote_paraphrase;
                    if (m == 1) parts[1] = ac.metaphor_filler;
                    if (m == 2) parts[2] = ac.narrative_filler;
                    const auto r = pipeline::verify_anchors({join(parts, cjk)}, trace, th);
                    const std::array<bool, 3> flags = {r.context_ok, r.empathy_ok, r.logic_ok};
                    for (int k = 0; k < 3; ++k) {
                        c.expect(flags[k] == (k != m), tag + " mutation " + std::to_string(m) + ": anchor " +
                                                           std::to_string(k) + " is " + (flags[k] ? "true" : "false"));
                    }
                    ++fixtures_run;
                }
            }
        }
        c.expect(fixtures_run >= 50, "at least 50 fixtures");
        c.note = std::to_string(fixtures_run) + " fixtures";
    });

    // ------------------------------------------------------------------ 3
    criterion(3, "metrics agree with brute-force oracles on random pairs", [](Checks& c) {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(7);
        metrics::ToyHashProvider toy(16);
        const int pairs = 200;
        for (int i = 0; i < pairs; ++i) {
            const auto a = oracle::random_tokens(rng, 1, 8, 4);
            const auto b = oracle::random_tokens(rng, 1, 8, 4);
            const std::string tag = "pair " + std::to_string(i);
            for (std::size_t n = 1; n <= 3; ++n) {
                c.near(metrics::bleu_n(seq(a), seq(b), n), oracle::bleu(a, b, n), 1e-9, tag + " BLEU-" + std::to_string(n));
                c.near(metrics::distinct_n({seq(a), seq(b)}, n), oracle::distinct({a, b}, n), 1e-9,
                       tag + " Distinct-" + std::to_string(n));
            }
            c.near(metrics::rouge_l(seq(a), seq(b)), oracle::rouge_l(a, b), 1e-9, tag + " ROUGE-L");
            c.near(metrics::meteor(seq(a), seq(b)), oracle::meteor(a, b), 1e-9, tag + " METEOR");
            c.near(metrics::bert_score(seq(a), seq(b), toy),
                   oracle::bert_score(oracle::toy_vectors(a, 16), oracle::toy_vectors(b, 16)), 1e-9, tag + " BERTScore");
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(secs < 10.0, "under 10 s");
        c.note = std::to_string(pairs) + " pairs";
    });

    // ------------------------------------------------------------------ 4
    criterion(4, "identity scores 1.0 and empty candidates score 0", [](Checks& c) {
        metrics::ToyHashProvider toy(64);
        for (const std::string s : {"I hear how much courage that took.", "我向喜欢的女孩坦白了过去", "a"}) {
            const auto t = metrics::tokenize(s);
            for (std::size_t n = 1; n <= 3; ++n) {
                if (t.size() >= n) c.expect(metrics::bleu_n(t, t, n) == 1.0, "BLEU-" + std::to_string(n) + " identity: " + s);
            }
            c.expect(metrics::rouge_l(t, t) == 1.0, "ROUGE-L identity: " + s);
            c.expect(metrics::bert_score(t, t, toy) == 1.0, "BERTScore identity: " + s);
            const metrics::TokenSeq empty;
            for (std::size_t n = 1; n <= 3; ++n) c.expect(metrics::bleu_n(empty, t, n) == 0.0, "BLEU empty candidate");
            c.expect(metrics::rouge_l(empty, t) == 0.0, "ROUGE-L empty candidate");
            c.expect(metrics::meteor(empty, t) == 0.0, "METEOR empty candidate");
        }
    });

    // ------------------------------------------------------------------ 5
    criterion(5, "corpus statistics: kept count and exclusion rate", [](Checks& c) {
        for (const auto& [refusal, audit] : std::vector<std::pair<std::size_t, std::size_t>>{{300, 80}, {380, 0}, {0, 380}, {190, 190}}) {
            const auto s = corpus::compute_stats(67778, refusal, audit);
            c.expect(s.kept == 67398, "kept " + std::to_string(s.kept));
            c.near(s.exclusion_rate, 0.0056, 0.00005, "exclusion rate");
        }
    });

    // ------------------------------------------------------------------ 6
    criterion(6, "dataset split sizes and stratified core set", [](Checks& c) {
        std::vector<corpus::DatasetEntry> entries;
        entries.reserve(67398);
        for (std::size_t i = 0; i < 67398; ++i) {
            const TopicCategory cat = kAllCategories[i % kAllCategories.size()];
            entries.push_back({"r" + std::to_string(i), cat, {"instr", "in", "out"}});
        }
        c.expect(corpus::train_size(67398, 0.9) == 60658, "train_size");
        const auto split = corpus::split_dataset(std::move(entries), {0.9, 42});
        c.expect(split.train.size() == 60658, "train " + std::to_string(split.train.size()));
        c.expect(split.test.size() == 6740, "test " + std::to_string(split.test.size()));
        const auto core = corpus::stratified_sample(split.test, 20, 42);
        c.expect(core.size() == 180, "core set " + std::to_string(core.size()));
        std::map<TopicCategory, int> per;
        for (const auto& e : core) ++per[e.category];
        for (TopicCategory cat : kAllCategories) c.expect(per[cat] == 20, std::string(to_string(cat)) + " stratum");
    });

    // ------------------------------------------------------------------ 7
    criterion(7, "one-sided signed-rank test: exact, 2^-n and normal approximation", [](Checks& c) {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> score(1, 5);
        int compared = 0;
        for (int trial = 0; compared < 200 && trial < 1000; ++trial) {
            const std::size_t n = 1 + trial % 12;
            std::vector<double> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = score(rng);
                b[i] = score(rng);
            }
            if (a == b) continue;
            const auto r = judge::wilcoxon_one_sided(a, b);
            c.near(r.p_value, oracle::wilcoxon_enumerated(a, b), 1e-12, "fixture " + std::to_string(trial));
            c.expect(r.method == judge::StatMethod::Exact, "exact method for n <= 12");
            ++compared;
        }
        c.expect(compared == 200, "200 fixtures compared");
        std::vector<double> a(10), b(10, 1.0);
        for (int i = 0; i < 10; ++i) a[i] = 1.5 + i;
        c.near(judge::wilcoxon_one_sided(a, b).p_value, 1.0 / 1024.0, 1e-15, "all-positive n = 10");
        // Frozen reference: scipy.stats.wilcoxon(alternative='greater', correction=True, method='approx').
        const std::vector<double> x = {3.40, 3.64, 3.18, 2.69, 3.04, 2.61, 3.45, 4.47, 3.01, 2.90,
                                       3.79, 3.69, 3.48, 2.66, 3.38, 3.96, 2.32, 3.03, 1.88, 2.37,
                                       1.93, 3.21, 2.39, 3.62, 3.53, 3.25, 1.39, 2.97, 3.36, 3.49};
        const std::vector<double> y = {1.78, 2.62, 2.22, 2.35, 3.85, 2.35, 2.97, 3.71, 2.53, 2.91,
                                       3.09, 3.05, 2.02, 3.06, 4.09, 1.76, 3.69, 3.10, 2.49, 4.60,
                                       3.61, 2.04, 3.06, 3.46, 2.85, 3.55, 2.95, 3.53, 4.15, 2.46};
        const auto r = judge::wilcoxon_one_sided(x, y, 0.05, 25);
        c.expect(r.method == judge::StatMethod::NormalApprox, "n = 30 uses the normal approximation");
        c.near(r.p_value, 0.32544885364178155, 0.005, "n = 30 p-value");
        c.note = "n=30 p=" + fmt2(r.p_value);
    });

    // ------------------------------------------------------------------ 8
    criterion(8, "blinding round trip, panel mean and a 180-case sweep", [](Checks& c) {
        std::mt19937_64 rng(8);
        for (int i = 0; i < 1000; ++i) {
            std::map<std::string, std::string> responses;
            for (int s = 0; s < 2 + i % 3; ++s) responses["system" + std::to_string(s)] = "reply " + std::to_string(rng());
            const auto item = judge::blind_pair("case" + std::to_string(i), responses, rng());
            item.validate();
            c.expect(judge::derandomize(item) == responses, "round trip " + std::to_string(i));
        }
        const std::vector<judge::ScoreSheet> panel = {{"c", "j1", judge::Dimension::Relevance, {{"s", 5}}},
                                                      {"c", "j2", judge::Dimension::Relevance, {{"s", 5}}},
                                                      {"c", "j3", judge::Dimension::Relevance, {{"s", 4}}}};
        const double mean = judge::aggregate_panel(panel).at(judge::Dimension::Relevance).at("s");
        c.expect(fmt2(judge::round2(mean)) == "4.67", "panel (5, 5, 4) gives " + fmt2(judge::round2(mean)));

        std::vector<judge::JudgeCase> cases;
        for (int i = 0; i < 180; ++i) {
            const std::string id = "core" + std::to_string(i);
            cases.push_back({id, "post " + id,
                             {{"eft", "It took courage to share this (" + id + ")."},
                              {"base", "Try to think positively (" + id + ")."}}});
        }
        gateway::StubEntry e;
        e.stage = "judge";
        e.reply = "{{slot_of:courage}}: 5\n{{slot_of:Try }}: 2";
        e.repeat = true;
        auto stub = std::make_shared<gateway::StubTransport>(std::vector<gateway::StubEntry>{e});
        gateway::GatewayOptions go;
        go.stub_only = true;
        gateway::Gateway gw(go, nullptr, stub, [](std::chrono::milliseconds) {});
        judge::JudgeConfig jc;
        jc.panel = {"j1", "j2", "j3"};
        jc.dimensions = {judge::kEftDimensions.begin(), judge::kEftDimensions.end()};
        jc.seed = 8;
        const auto routing = fixtures::single_route({"j1", "j2", "j3"});
        const auto run = judge::run_judging(cases, jc, gw, routing, judge::RubricSet());
        c.expect(run.gaps.empty(), std::to_string(run.gaps.size()) + " gaps");
        const auto report = judge::build_judge_report(run, jc, {"eft"});
        const double wr = report["win_rates"]["against"]["base"]["win_rate"].get<double>();
        c.expect(fmt2(wr) == "1.00", "win rate " + fmt2(wr));
        const auto& cell = report["significance"]["overall"]["row_beats_column"][0][1];
        c.expect(cell.is_object() && cell["significant"].get<bool>(), "eft > base significant");
        if (cell.is_object()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "p=%.3g, %s", cell["p_value"].get<double>(),
                          cell["method"].get<std::string>().c_str());
            c.note = buf;
        }
    });

    // ------------------------------------------------------------------ 9
    criterion(9, "report tables reproduce the reference layout and values", [](Checks& c) {
        using judge::Dimension;
        const std::vector<Dimension> eft(judge::kEftDimensions.begin(), judge::kEftDimensions.end());
        const std::vector<Dimension> gen(judge::kGeneralDimensions.begin(), judge::kGeneralDimensions.end());

        auto check_dimension_table = [&](const std::vector<Column>& cols, const std::vector<std::string>& rows) {
            std::vector<std::string> systems;
            for (const auto& col : cols) systems.push_back(col.system);
            const auto md = judge::render_dimension_rows(judge::aggregate_panel(sheets_for(cols, eft)), eft, systems);
            for (const auto& row : rows) c.expect(md.find(row + "\n") != std::string::npos, "missing row: " + row);
        };
        check_dimension_table({{"Standard", {2.23, 3.62, 3.63, 3.78, 3.33}}, {"EFT-CoT", {4.84, 4.73, 4.99, 4.99, 4.99}}},
                              {"| Metric | Standard | EFT-CoT |", "| Somatic Awareness | 2.23 | 4.84 |",
                               "| Emotional Hierarchy | 3.62 | 4.73 |", "| Cognitive Insight | 3.63 | 4.99 |",
                               "| Need Analysis | 3.78 | 4.99 |", "| Restructuring Power | 3.33 | 4.99 |",
                               "| Average | 3.32 | 4.91 |"});
        check_dimension_table({{"w/o Som.", {3.38, 4.02, 4.17, 4.25, 4.10}},
                               {"w/o Cog.", {3.97, 3.90, 4.09, 4.05, 4.03}},
                               {"w/o Res.", {4.13, 4.07, 4.29, 4.36, 4.20}},
                               {"EFT-CoT", {4.51, 4.64, 4.87, 4.93, 4.88}}},
                              {"| Metric | w/o Som. | w/o Cog. | w/o Res. | EFT-CoT |",
                               "| Somatic Awareness | 3.38 | 3.97 | 4.13 | 4.51 |",
                               "| Emotional Hierarchy | 4.02 | 3.90 | 4.07 | 4.64 |",
                               "| Cognitive Insight | 4.17 | 4.09 | 4.29 | 4.87 |",
                               "| Need Analysis | 4.25 | 4.05 | 4.36 | 4.93 |",
                               "| Restructuring Power | 4.10 | 4.03 | 4.20 | 4.88 |",
                               "| Average | 3.98 | 4.01 | 4.21 | 4.77 |"});

        const std::vector<Column> counseling = {{"EFT-LLM", {4.95, 4.99, 4.63, 4.92}},
                                                {"Qwen", {3.10, 2.21, 2.93, 2.71}},
                                                {"GPT-4o", {3.84, 3.28, 3.62, 3.67}},
                                                {"CBT-LLM", {4.25, 3.82, 4.22, 4.25}},
                                                {"PsyQA", {3.05, 2.72, 2.76, 2.44}}};
        std::vector<std::string> systems;
        for (const auto& col : counseling) systems.push_back(col.system);
        const auto md = judge::render_system_rows(judge::aggregate_panel(sheets_for(counseling, gen)), gen, systems);
        for (const std::string row : {"| Model | Rel. | Emp. | Help. | Struct. | Avg. |",
                                      "| EFT-LLM | 4.95 | 4.99 | 4.63 | 4.92 | 4.87 |",
                                      "| Qwen | 3.10 | 2.21 | 2.93 | 2.71 | 2.74 |",
                                      "| GPT-4o | 3.84 | 3.28 | 3.62 | 3.67 | 3.60 |",
                                      "| CBT-LLM | 4.25 | 3.82 | 4.22 | 4.25 | 4.14 |",
                                      "| PsyQA | 3.05 | 2.72 | 2.76 | 2.44 | 2.74 |"}) {
            c.expect(md.find(row + "\n") != std::string::npos, "missing row: " + row);
        }

        auto report_of = [](std::array<double, 9> v) {
            metrics::MetricReport r;
            r.meteor = v[0] / 100;
            r.bleu1 = v[1] / 100;
            r.bleu2 = v[2] / 100;
            r.bleu3 = v[3] / 100;
            r.rouge_l = v[4] / 100;
            r.distinct1 = v[5] / 100;
            r.distinct2 = v[6] / 100;
            r.distinct3 = v[7] / 100;
            r.bert_score = v[8] / 100;
            return r;
        };
        const auto table = metrics::render_metric_table(
            {{"Base Model", report_of({34.02, 38.43, 22.10, 12.69, 17.76, 33.46, 70.59, 86.13, 78.96})},
             {"EFT-LLM", report_of({47.86, 61.70, 45.72, 35.29, 36.80, 42.70, 82.45, 93.24, 88.35})}});
        for (const std::string row : {"| System | METEOR | B-1 | B-2 | B-3 | R-L | D-1 | D-2 | D-3 | BERTScore |",
                                      "| Base Model | 34.02 | 38.43 | 22.10 | 12.69 | 17.76 | 33.46 | 70.59 | 86.13 | 78.96 |",
                                      "| EFT-LLM | 47.86 | 61.70 | 45.72 | 35.29 | 36.80 | 42.70 | 82.45 | 93.24 | 88.35 |"}) {
            c.expect(table.find(row + "\n") != std::string::npos, "missing row: " + row);
        }
    });

    // ------------------------------------------------------------------ 10
    criterion(10, "two offline runs produce identical outputs", [](Checks& c) {
        const char* nn = std::getenv("NO_NETWORK");
        c.expect(nn != nullptr && std::string(nn) == "1", "NO_NETWORK=1 is set");
        const auto cfg = workbench::load_run_config(fixtures::config_dir() / "demo.json");
        fixtures::TempDir dir;
        const auto work = dir.path() / "run";
        run_chain(cfg, work);
        const auto first = snapshot(work);
        fs::remove_all(work);
        run_chain(cfg, work);
        const auto second = snapshot(work);
        c.expect(first.size() >= 10, std::to_string(first.size()) + " output files");
        c.expect(first.size() == second.size(), "same file set");
        for (const auto& [name, content] : first) {
            auto it = second.find(name);
            c.expect(it != second.end() && it->second == content, "differs: " + name);
        }
        c.note = std::to_string(first.size()) + " files compared";
    });

    std::printf("%s: %d criterion(s) failed\n", g_failed == 0 ? "ACCEPTED" : "REJECTED", g_failed);
    return g_failed == 0 ? 0 : 1;
}

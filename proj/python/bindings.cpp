#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/trace_validation.hpp"
#include "eftcot/corpus/dataset.hpp"
#include "eftcot/judge/scoring.hpp"
#include "eftcot/judge/stats.hpp"
#include "eftcot/metrics/report.hpp"
#include "eftcot/metrics/text_metrics.hpp"
#include "eftcot/pipeline/anchors.hpp"
#include "eftcot/workbench/commands.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace eftcot;

namespace {

metrics::TokenizeMode mode_of(const std::string& s) {
    if (s == "character") return metrics::TokenizeMode::Character;
    if (s == "whitespace") return metrics::TokenizeMode::Whitespace;
    throw ConfigError("tokenize mode must be 'character' or 'whitespace'");
}

judge::TieMode ties_of(const std::string& s) {
    if (s == "half") return judge::TieMode::Half;
    if (s == "exclude") return judge::TieMode::Exclude;
    throw ConfigError("tie mode must be 'half' or 'exclude'");
}

workbench::RunConfig config_with(const fs::path& path, const std::optional<fs::path>& stub_script) {
    workbench::RunConfig cfg = workbench::load_run_config(path);
    if (stub_script) cfg.stub_script = fs::absolute(*stub_script);
    return cfg;
}

// (exit code, manifest JSON text)
std::pair<int, std::string> result_of(const workbench::CommandResult& r) {
    return {r.exit_code, workbench::to_json(r.manifest).dump()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core: metrics, statistics, trace checks and workbench commands";

    auto base = py::register_exception<Error>(m, "EftcotError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<judge::DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<metrics::EmptyInputError>(m, "EmptyInputError", base.ptr());

    m.def(
        "tokenize",
        [](const std::string& text, const std::string& mode) {
            const auto seq = metrics::tokenize(text, mode_of(mode));
            return std::vector<std::string>(seq.begin(), seq.end());
        },
        py::arg("text"), py::arg("mode") = "character");
    m.def(
        "bleu",
        [](const std::string& c, const std::string& r, std::size_t n, const std::string& mode) {
            return metrics::bleu_n(metrics::tokenize(c, mode_of(mode)), metrics::tokenize(r, mode_of(mode)), n);
        },
        py::arg("candidate"), py::arg("reference"), py::arg("n"), py::arg("mode") = "character");
    m.def(
        "rouge_l",
        [](const std::string& c, const std::string& r, const std::string& mode) {
            return metrics::rouge_l(metrics::tokenize(c, mode_of(mode)), metrics::tokenize(r, mode_of(mode)));
        },
        py::arg("candidate"), py::arg("reference"), py::arg("mode") = "character");
    m.def(
        "meteor",
        [](const std::string& c, const std::string& r, const std::string& mode) {
            return metrics::meteor(metrics::tokenize(c, mode_of(mode)), metrics::tokenize(r, mode_of(mode)));
        },
        py::arg("candidate"), py::arg("reference"), py::arg("mode") = "character");
    m.def(
        "distinct",
        [](const std::vector<std::string>& texts, std::size_t n, const std::string& mode) {
            std::vector<metrics::TokenSeq> corpus;
            for (const auto& t : texts) corpus.push_back(metrics::tokenize(t, mode_of(mode)));
            return metrics::distinct_n(corpus, n);
        },
        py::arg("texts"), py::arg("n"), py::arg("mode") = "character");
    m.def(
        "evaluate_pairs_json",
        [](const std::vector<std::pair<std::string, std::string>>& pairs, std::size_t toy_dimension,
           const std::string& mode) {
            std::vector<metrics::EvalPair> ps;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                ps.push_back({std::to_string(i + 1), pairs[i].first, pairs[i].second});
            }
            metrics::MetricOptions opts;
            opts.tokenize = mode_of(mode);
            std::optional<metrics::ToyHashProvider> toy;
            if (toy_dimension > 0) toy.emplace(toy_dimension);
            py::gil_scoped_release release;
            const auto report = metrics::evaluate_corpus(ps, toy ? &*toy : nullptr, opts);
            return metrics::report_to_json(report, opts, toy ? toy->name() : std::string()).dump();
        },
        py::arg("pairs"), py::arg("toy_dimension") = 0, py::arg("mode") = "character");

    m.def(
        "wilcoxon_json",
        [](const std::vector<double>& a, const std::vector<double>& b, double alpha, std::size_t cutoff) {
            const auto r = judge::wilcoxon_one_sided(a, b, alpha, cutoff);
            return ordered_json{{"statistic", r.statistic},
                                {"n_effective", r.n_effective},
                                {"p_value", r.p_value},
                                {"alpha", r.alpha},
                                {"significant", r.significant},
                                {"method", std::string(judge::to_string(r.method))}}
                .dump();
        },
        py::arg("a"), py::arg("b"), py::arg("alpha") = 0.05, py::arg("exact_cutoff") = 25);
    m.def(
        "win_rate",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& ties) {
            if (a.size() != b.size()) throw ConfigError("score lists differ in length");
            std::vector<judge::Preference> prefs;
            for (std::size_t i = 0; i < a.size(); ++i) prefs.push_back(judge::prefer(a[i], b[i]));
            return judge::win_rate(prefs, ties_of(ties));
        },
        py::arg("a"), py::arg("b"), py::arg("ties") = "half");
    m.def("parse_judge_score", &judge::parse_judge_score, py::arg("reply"), py::arg("slots"));
    m.def("round2", &judge::round2);

    m.def("train_size", &corpus::train_size, py::arg("n"), py::arg("fraction"));

    m.def(
        "validate_trace_json",
        [](const std::string& text, const std::string& need_prefix) {
            const json j = json::parse(text);
            const ReasoningTrace t = j.contains("cot") ? triplet_from_json(j).cot : trace_from_json(j);
            std::vector<std::tuple<std::string, std::string, std::string>> out;
            for (const auto& v : validate_trace(t, need_prefix).violations) {
                out.emplace_back(std::string(to_string(v.stage)), v.rule, v.detail);
            }
            return out;
        },
        py::arg("trace"), py::arg("need_prefix") = "I need");
    m.def(
        "verify_anchors_json",
        [](const std::string& text, double empathy, double logic) {
            const json j = json::parse(text);
            const ReasoningTrace t = j.contains("cot") ? triplet_from_json(j).cot : trace_from_json(j);
            if (!t.a8) throw FormatError("a8", "trace has no final response");
            const auto r = pipeline::verify_anchors(*t.a8, t, {empathy, logic});
            return ordered_json{{"passed", r.passed},
                                {"context_ok", r.context_ok},
                                {"matched_quote", r.matched_quote},
                                {"empathy_ok", r.empathy_ok},
                                {"empathy_coverage", r.empathy_coverage},
                                {"logic_ok", r.logic_ok},
                                {"logic_overlap", r.logic_overlap},
                                {"first_failure", r.first_failure()}}
                .dump();
        },
        py::arg("trace"), py::arg("empathy") = 0.5, py::arg("logic") = 0.15);

    m.def(
        "synthesize",
        [](const fs::path& config, const fs::path& corpus, const fs::path& out, std::uint64_t seed, int workers,
           bool resume, bool strict, std::optional<std::size_t> limit, std::optional<fs::path> stub_script) {
            const auto cfg = config_with(config, stub_script);
            py::gil_scoped_release release;
            return result_of(workbench::cmd_synthesize(cfg, corpus, out, {seed, workers, resume, strict, limit}));
        },
        py::arg("config"), py::arg("corpus"), py::arg("out"), py::arg("seed"), py::arg("workers") = 1,
        py::arg("resume") = false, py::arg("strict") = false, py::arg("limit") = py::none(),
        py::arg("stub_script") = py::none());
    m.def(
        "build_dataset",
        [](const fs::path& config, const fs::path& triplets, const fs::path& out_dir, std::uint64_t seed,
           int workers, bool strict, std::optional<std::size_t> per_category, std::optional<fs::path> stub_script) {
            const auto cfg = config_with(config, stub_script);
            py::gil_scoped_release release;
            return result_of(
                workbench::cmd_build_dataset(cfg, triplets, out_dir, {seed, workers, strict, per_category}));
        },
        py::arg("config"), py::arg("triplets"), py::arg("out_dir"), py::arg("seed"), py::arg("workers") = 1,
        py::arg("strict") = false, py::arg("per_category") = py::none(), py::arg("stub_script") = py::none());
    m.def(
        "eval_auto",
        [](std::optional<fs::path> config, const fs::path& pairs, const fs::path& out_dir, const std::string& system,
           bool no_embedder, int workers) {
            std::optional<workbench::RunConfig> cfg;
            if (config) cfg = workbench::load_run_config(*config);
            py::gil_scoped_release release;
            return result_of(
                workbench::cmd_eval_auto(cfg ? &*cfg : nullptr, pairs, out_dir, {system, no_embedder, workers}));
        },
        py::arg("config"), py::arg("pairs"), py::arg("out_dir"), py::arg("system") = "system",
        py::arg("no_embedder") = false, py::arg("workers") = 1);
    m.def(
        "eval_judge",
        [](const fs::path& config, const fs::path& cases, const std::vector<std::pair<std::string, fs::path>>& systems,
           const fs::path& out_dir, std::uint64_t seed, int workers, bool strict, std::optional<std::size_t> limit,
           std::optional<std::string> reference, std::optional<fs::path> stub_script) {
            const auto cfg = config_with(config, stub_script);
            std::vector<workbench::SystemResponses> sys;
            for (const auto& [name, path] : systems) sys.push_back({name, path});
            py::gil_scoped_release release;
            return result_of(
                workbench::cmd_eval_judge(cfg, cases, sys, out_dir, {seed, workers, strict, limit, reference}));
        },
        py::arg("config"), py::arg("cases"), py::arg("systems"), py::arg("out_dir"), py::arg("seed"),
        py::arg("workers") = 1, py::arg("strict") = false, py::arg("limit") = py::none(),
        py::arg("reference") = py::none(), py::arg("stub_script") = py::none());
    m.def(
        "validate_trace_file",
        [](const fs::path& path, const std::string& need_prefix) {
            const auto c = workbench::cmd_validate_trace(path, need_prefix);
            return std::make_tuple(c.records, c.invalid, c.messages);
        },
        py::arg("path"), py::arg("need_prefix") = "I need");
    m.def("report", &workbench::cmd_report, py::arg("metrics") = std::vector<fs::path>{},
          py::arg("scores") = std::vector<fs::path>{}, py::arg("reference") = "", py::arg("alpha") = 0.05,
          py::arg("exact_cutoff") = 25);
}

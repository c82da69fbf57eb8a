#include "eftcot/workbench/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/unicode.hpp"
#include "eftcot/corpus/filtering.hpp"

namespace eftcot::workbench {

namespace fs = std::filesystem;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration (" + std::to_string(problems.size()) + " problem" +
                      (problems.size() == 1 ? "" : "s") + "):";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
}

// Collects problems instead of throwing on the first one.
class Reader {
public:
    Reader(const json& root, fs::path base) : root_(root), base_(std::move(base)) {}

    std::vector<std::string> problems;

    const json* section(const char* name) {
        auto it = root_.find(name);
        if (it == root_.end() || it->is_null()) return nullptr;
        if (!it->is_object()) {
            problems.push_back(std::string(name) + ": expected an object");
            return nullptr;
        }
        return &*it;
    }

    template <typename T>
    std::optional<T> get(const json* obj, const std::string& where, const char* key) {
        if (obj == nullptr) return std::nullopt;
        auto it = obj->find(key);
        if (it == obj->end() || it->is_null()) return std::nullopt;
        try {
            return it->get<T>();
        } catch (const json::exception&) {
            problems.push_back(where + "." + key + ": wrong type");
            return std::nullopt;
        }
    }

    template <typename T>
    void read(const json* obj, const std::string& where, const char* key, T& target) {
        if (auto v = get<T>(obj, where, key)) target = *v;
    }

    std::optional<fs::path> path(const json* obj, const std::string& where, const char* key, bool directory) {
        auto raw = get<std::string>(obj, where, key);
        if (!raw) return std::nullopt;
        fs::path p(*raw);
        if (p.is_relative()) p = base_ / p;
        p = p.lexically_normal();
        const bool ok = directory ? fs::is_directory(p) : fs::is_regular_file(p);
        if (!ok) problems.push_back(where + "." + key + ": " + (directory ? "directory " : "file ") + p.string() +
                                    " does not exist");
        return p;
    }

private:
    const json& root_;
    fs::path base_;
};

gateway::GenerationParams read_params(Reader& r, const json* obj, const std::string& where,
                                      gateway::GenerationParams base) {
    r.read(obj, where, "temperature", base.temperature);
    r.read(obj, where, "top_p", base.top_p);
    r.read(obj, where, "max_tokens", base.max_tokens);
    try {
        base.validate();
    } catch (const ConfigError& e) {
        r.problems.push_back(where + ": " + e.what());
    }
    return base;
}

} // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> problems)
    : ConfigError(join_problems(problems)), problems_(std::move(problems)) {}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

gateway::RoutingTable RunConfig::routing() const { return gateway::RoutingTable(endpoints, routes, default_route); }

const gateway::ModelEndpoint& RunConfig::endpoint(const std::string& id) const {
    for (const auto& e : endpoints) {
        if (e.id == id) return e;
    }
    throw ConfigError("endpoint '" + id + "' is not configured");
}

RunConfig load_run_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ConfigValidationError({"config file " + path.string() + " does not exist"});
    RunConfig cfg;
    cfg.path = fs::absolute(path).lexically_normal();
    const std::string bytes = read_file(path);
    cfg.sha256 = sha256_hex(bytes);
    const json root = json::parse(bytes, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        throw ConfigValidationError({path.string() + " is not a JSON object"});
    }
    Reader r(root, cfg.path.parent_path());

    const gateway::GenerationParams defaults = read_params(r, r.section("generation"), "generation", {});

    if (auto it = root.find("endpoints"); it != root.end() && it->is_array() && !it->empty()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& e = (*it)[i];
            const std::string where = "endpoints[" + std::to_string(i) + "]";
            if (!e.is_object()) {
                r.problems.push_back(where + ": expected an object");
                continue;
            }
            gateway::ModelEndpoint ep;
            r.read(&e, where, "id", ep.id);
            r.read(&e, where, "base_url", ep.base_url);
            r.read(&e, where, "model", ep.model_name);
            r.read(&e, where, "auth_env", ep.auth_env_var);
            r.read(&e, where, "max_concurrency", ep.max_concurrency);
            r.read(&e, where, "timeout_s", ep.timeout_s);
            const std::string kind = r.get<std::string>(&e, where, "kind").value_or("openai");
            if (kind == "stub") ep.kind = gateway::EndpointKind::Stub;
            else if (kind != "openai") r.problems.push_back(where + ".kind: expected 'openai' or 'stub'");
            const json* gen = e.contains("generation") && e["generation"].is_object() ? &e["generation"] : nullptr;
            ep.params = read_params(r, gen, where + ".generation", defaults);
            if (ep.id.empty()) r.problems.push_back(where + ": missing id");
            if (ep.kind == gateway::EndpointKind::OpenAICompatible && ep.base_url.empty()) {
                r.problems.push_back(where + ": missing base_url");
            }
            if (ep.max_concurrency < 1) r.problems.push_back(where + ".max_concurrency: must be at least 1");
            cfg.endpoints.push_back(std::move(ep));
        }
    } else {
        r.problems.push_back("endpoints: expected a non-empty array");
    }

    if (const json* routing = r.section("routing")) {
        for (const auto& [key, value] : routing->items()) {
            if (!value.is_string()) {
                r.problems.push_back("routing." + key + ": expected an endpoint id");
                continue;
            }
            if (key == "default") {
                cfg.default_route = value.get<std::string>();
                continue;
            }
            try {
                cfg.routes[parse_category(key)] = value.get<std::string>();
            } catch (const UnknownCategoryError&) {
                r.problems.push_back("routing: unknown category '" + key + "'");
            }
        }
    }
    for (const auto& p : cfg.routing().problems()) r.problems.push_back("routing: " + p);

    if (const json* retry = r.section("retry")) {
        r.read(retry, "retry", "max_retries", cfg.gateway.retry.max_retries);
        if (auto ms = r.get<int>(retry, "retry", "base_ms")) cfg.gateway.retry.base = std::chrono::milliseconds(*ms);
        r.read(retry, "retry", "factor", cfg.gateway.retry.factor);
        r.read(retry, "retry", "jitter", cfg.gateway.retry.jitter);
        if (cfg.gateway.retry.max_retries < 0) r.problems.push_back("retry.max_retries: must be non-negative");
        if (cfg.gateway.retry.jitter < 0 || cfg.gateway.retry.jitter >= 1) {
            r.problems.push_back("retry.jitter: must be in [0, 1)");
        }
    }
    r.read(&root, "config", "refusal_phrases", cfg.gateway.refusal_phrases);
    r.read(&root, "config", "stub_only", cfg.gateway.stub_only);
    if (const char* nn = std::getenv("NO_NETWORK"); nn != nullptr && std::string(nn) == "1") {
        cfg.gateway.stub_only = true;
    }
    cfg.stub_script = r.path(&root, "config", "stub_script", false);

    const json* pl = r.section("pipeline");
    if (auto dir = r.path(pl, "pipeline", "prompt_dir", true)) {
        cfg.prompt_dir = *dir;
        if (fs::is_directory(*dir)) {
            try {
                pipeline::PromptSet::load_directory(*dir);
            } catch (const Error& e) {
                r.problems.push_back(std::string("pipeline.prompt_dir: ") + e.what());
            }
        }
    } else {
        r.problems.push_back("pipeline.prompt_dir: required");
    }
    r.read(pl, "pipeline", "need_prefix", cfg.pipeline.need_prefix);
    r.read(pl, "pipeline", "stage_max_retries", cfg.pipeline.stage_max_retries);
    r.read(pl, "pipeline", "anchor_regenerations", cfg.pipeline.anchor_regenerations);
    r.read(pl, "pipeline", "empathy_threshold", cfg.pipeline.thresholds.empathy);
    r.read(pl, "pipeline", "logic_threshold", cfg.pipeline.thresholds.logic);
    if (cfg.pipeline.stage_max_retries < 0) r.problems.push_back("pipeline.stage_max_retries: must be non-negative");
    if (cfg.pipeline.anchor_regenerations < 0) {
        r.problems.push_back("pipeline.anchor_regenerations: must be non-negative");
    }
    for (double t : {cfg.pipeline.thresholds.empathy, cfg.pipeline.thresholds.logic}) {
        if (t < 0.0 || t > 1.0) r.problems.push_back("pipeline: anchor thresholds must be in [0, 1]");
    }

    const json* ds = r.section("dataset");
    if (auto file = r.path(ds, "dataset", "instruction_file", false); file && fs::is_regular_file(*file)) {
        cfg.instruction = text::trim(read_file(*file));
    }
    r.read(ds, "dataset", "instruction", cfg.instruction);
    if (text::is_blank(cfg.instruction)) r.problems.push_back("dataset: instruction or instruction_file required");
    r.read(ds, "dataset", "train_fraction", cfg.train_fraction);
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        r.problems.push_back("dataset.train_fraction: must be in (0, 1)");
    }
    r.read(ds, "dataset", "per_category", cfg.per_category);
    cfg.audit_endpoint = r.get<std::string>(ds, "dataset", "audit_endpoint");
    cfg.audit_prompt = corpus::default_audit_prompt();
    if (auto file = r.path(ds, "dataset", "audit_prompt_file", false); file && fs::is_regular_file(*file)) {
        cfg.audit_prompt = read_file(*file);
        if (cfg.audit_prompt.find("{{record}}") == std::string::npos) {
            r.problems.push_back("dataset.audit_prompt_file: must contain {{record}}");
        }
    }
    cfg.filter_patterns = cfg.gateway.refusal_phrases;
    r.read(ds, "dataset", "refusal_patterns", cfg.filter_patterns);
    if (cfg.filter_patterns.empty()) r.problems.push_back("dataset.refusal_patterns: must not be empty");

    if (const json* m = r.section("metrics")) {
        const std::string tok = r.get<std::string>(m, "metrics", "tokenize").value_or("character");
        if (tok == "whitespace") cfg.metrics.tokenize = metrics::TokenizeMode::Whitespace;
        else if (tok != "character") r.problems.push_back("metrics.tokenize: expected 'character' or 'whitespace'");
        const std::string mode = r.get<std::string>(m, "metrics", "bert_mode").value_or("greedy");
        if (mode == "sentence") cfg.metrics.bert_mode = metrics::BertScoreMode::SentenceCosine;
        else if (mode != "greedy") r.problems.push_back("metrics.bert_mode: expected 'greedy' or 'sentence'");
        if (auto it = m->find("embedder"); it != m->end() && it->is_object()) {
            const std::string type = r.get<std::string>(&*it, "metrics.embedder", "type").value_or("");
            if (type == "toy") {
                cfg.embedder.kind = EmbedderConfig::Kind::Toy;
                r.read(&*it, "metrics.embedder", "dimension", cfg.embedder.dimension);
                if (cfg.embedder.dimension == 0) r.problems.push_back("metrics.embedder.dimension: must be positive");
            } else if (type == "http") {
                cfg.embedder.kind = EmbedderConfig::Kind::Http;
                r.read(&*it, "metrics.embedder", "endpoint", cfg.embedder.endpoint_id);
            } else {
                r.problems.push_back("metrics.embedder.type: expected 'toy' or 'http'");
            }
        }
    }

    if (const json* jd = r.section("judge")) {
        r.read(jd, "judge", "panel", cfg.judge_panel);
        if (auto mode = r.get<std::string>(jd, "judge", "mode")) {
            try {
                cfg.judge_mode = judge::parse_judge_mode(*mode);
            } catch (const ConfigError& e) {
                r.problems.push_back(std::string("judge.mode: ") + e.what());
            }
        }
        for (const auto& name : r.get<std::vector<std::string>>(jd, "judge", "dimensions").value_or(std::vector<std::string>{})) {
            try {
                cfg.judge_dimensions.push_back(judge::parse_dimension(name));
            } catch (const judge::UnknownDimensionError& e) {
                r.problems.push_back(std::string("judge.dimensions: ") + e.what());
            }
        }
        cfg.rubric_dir = r.path(jd, "judge", "rubric_dir", true);
        if (cfg.rubric_dir && fs::is_directory(*cfg.rubric_dir)) {
            try {
                judge::RubricSet::load_directory(*cfg.rubric_dir);
            } catch (const Error& e) {
                r.problems.push_back(std::string("judge.rubric_dir: ") + e.what());
            }
        }
        r.read(jd, "judge", "alpha", cfg.alpha);
        r.read(jd, "judge", "exact_cutoff", cfg.exact_cutoff);
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) r.problems.push_back("judge.alpha: must be in (0, 1)");
        const std::string ties = r.get<std::string>(jd, "judge", "tie_mode").value_or("half");
        if (ties == "exclude") cfg.tie_mode = judge::TieMode::Exclude;
        else if (ties != "half") r.problems.push_back("judge.tie_mode: expected 'half' or 'exclude'");
        r.read(jd, "judge", "reference_system", cfg.reference_system);
        r.read(jd, "judge", "redact_terms", cfg.redact_terms);
    }

    auto known = [&](const std::string& id) {
        for (const auto& e : cfg.endpoints) {
            if (e.id == id) return true;
        }
        return false;
    };
    for (const auto& id : cfg.judge_panel) {
        if (!known(id)) r.problems.push_back("judge.panel: unknown endpoint '" + id + "'");
    }
    if (cfg.audit_endpoint && !known(*cfg.audit_endpoint)) {
        r.problems.push_back("dataset.audit_endpoint: unknown endpoint '" + *cfg.audit_endpoint + "'");
    }
    if (cfg.embedder.kind == EmbedderConfig::Kind::Http && !known(cfg.embedder.endpoint_id)) {
        r.problems.push_back("metrics.embedder.endpoint: unknown endpoint '" + cfg.embedder.endpoint_id + "'");
    }

    if (!r.problems.empty()) throw ConfigValidationError(r.problems);
    return cfg;
}

std::vector<std::string> missing_credentials(const RunConfig& config, const std::vector<std::string>& endpoint_ids) {
    std::vector<std::string> missing;
    if (config.gateway.stub_only) return missing;
    for (const auto& id : endpoint_ids) {
        const auto& ep = config.endpoint(id);
        if (ep.kind == gateway::EndpointKind::Stub || ep.auth_env_var.empty()) continue;
        const char* v = std::getenv(ep.auth_env_var.c_str());
        if (v == nullptr || *v == '\0') missing.push_back(ep.auth_env_var + " (endpoint " + id + ")");
    }
    return missing;
}

} // namespace eftcot::workbench

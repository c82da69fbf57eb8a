#include "eftcot/pipeline/prompts.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "eftcot/core/unicode.hpp"

namespace eftcot::pipeline {

namespace {

const std::regex& placeholder_re() {
    static const std::regex re(R"(\{\{\s*([A-Za-z_][A-Za-z0-9_]*)\s*\}\})");
    return re;
}

bool is_general_binding(const std::string& name) {
    return name == "post" || name == "category" || name == "need_prefix";
}

std::string join(const std::set<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

} // namespace

std::vector<std::string> template_placeholders(std::string_view tmpl) {
    std::vector<std::string> out;
    const std::string s(tmpl);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), placeholder_re()); it != std::sregex_iterator(); ++it) {
        std::string name = (*it)[1].str();
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    }
    return out;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    const std::string s(tmpl);
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), placeholder_re()); it != std::sregex_iterator(); ++it) {
        out.append(s, last, static_cast<std::size_t>(it->position()) - last);
        const std::string name = (*it)[1].str();
        auto v = values.find(name);
        if (v == values.end()) throw TemplateError("no value for placeholder {{" + name + "}}");
        out += v->second;
        last = static_cast<std::size_t>(it->position() + it->length());
    }
    out.append(s, last, std::string::npos);
    return out;
}

std::set<std::string> default_bindings(Stage stage) {
    switch (stage) {
    case Stage::A1: return {"post"};
    case Stage::A2: return {"post", "a1"};
    case Stage::A3: return {"post", "a1", "a2"};
    case Stage::A4: return {"post", "a1", "a3"};
    case Stage::A5: return {"post", "a3", "a4"};
    case Stage::A6: return {"post", "a4", "a5", "need_prefix"};
    case Stage::A7: return {"post", "a2", "a5", "a6"};
    case Stage::A8: return {"post", "a2", "a6", "a7"};
    }
    return {};
}

void validate_prompt(const StagePrompt& prompt) {
    const std::string where = std::string(to_string(prompt.stage)) + " prompt";
    for (const auto& name : prompt.bindings) {
        if (is_general_binding(name)) continue;
        auto bound = parse_stage(name);
        if (!bound || name != field_name(*bound)) {
            throw TemplateError(where + ": unknown binding '" + name + "'");
        }
        if (stage_index(*bound) >= stage_index(prompt.stage)) {
            throw TemplateError(where + ": binding '" + name + "' is not an earlier stage");
        }
    }
    const auto found = template_placeholders(prompt.system_template);
    const std::set<std::string> used(found.begin(), found.end());
    if (used != prompt.bindings) {
        throw TemplateError(where + ": placeholders {" + join(used) + "} do not match bindings {" +
                            join(prompt.bindings) + "}");
    }
}

StagePrompt parse_prompt_file(Stage stage, std::string_view contents) {
    StagePrompt p;
    p.stage = stage;
    std::string body(contents);
    static const std::regex header(R"(^bindings:([^\n]*)\n)");
    std::smatch m;
    if (std::regex_search(body, m, header)) {
        std::stringstream names(m[1].str());
        std::string name;
        while (std::getline(names, name, ',')) {
            name = text::trim(name);
            if (!name.empty()) p.bindings.insert(name);
        }
        body = m.suffix().str();
    } else {
        p.bindings = default_bindings(stage);
    }
    p.system_template = std::move(body);
    return p;
}

PromptSet::PromptSet(std::array<StagePrompt, 8> prompts) : prompts_(std::move(prompts)) {
    for (Stage s : kAllStages) {
        if (prompts_[stage_index(s)].stage != s) throw TemplateError("prompt set is out of stage order");
        validate_prompt(prompts_[stage_index(s)]);
    }
}

PromptSet PromptSet::load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw TemplateError("prompt directory " + dir.string() + " does not exist");
    std::array<StagePrompt, 8> prompts{};
    for (Stage s : kAllStages) {
        const auto path = dir / (std::string(field_name(s)) + ".txt");
        std::ifstream in(path);
        if (!in) throw TemplateError("missing prompt template " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        prompts[stage_index(s)] = parse_prompt_file(s, buf.str());
    }
    return PromptSet(std::move(prompts));
}

} // namespace eftcot::pipeline

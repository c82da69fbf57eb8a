#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "eftcot/core/types.hpp"

namespace eftcot::pipeline {

class TemplateError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Placeholders `{{name}}` in order of first appearance.
std::vector<std::string> template_placeholders(std::string_view tmpl);

/// Substitutes every placeholder; throws TemplateError for names without a value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

struct StagePrompt {
    Stage stage = Stage::A1;
    std::string system_template;
    /// Names interpolated into the template: post, category, need_prefix, a1..a8.
    std::set<std::string> bindings;
};

/// Bindings each stage receives when its template file does not declare them.
std::set<std::string> default_bindings(Stage stage);

/// Checks that placeholders equal the declared bindings and that stage
/// bindings refer only to earlier stages. Throws TemplateError.
void validate_prompt(const StagePrompt& prompt);

/// Parses a template file body. An optional first line `bindings: a, b, c`
/// declares the bindings; otherwise default_bindings(stage) applies.
StagePrompt parse_prompt_file(Stage stage, std::string_view contents);

class PromptSet {
public:
    PromptSet() = default;
    explicit PromptSet(std::array<StagePrompt, 8> prompts);

    /// Loads a1.txt .. a8.txt from `dir` and validates each.
    static PromptSet load_directory(const std::filesystem::path& dir);

    const StagePrompt& get(Stage s) const { return prompts_[stage_index(s)]; }

private:
    std::array<StagePrompt, 8> prompts_{};
};

} // namespace eftcot::pipeline

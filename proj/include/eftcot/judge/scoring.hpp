#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "eftcot/core/json_io.hpp"
#include "eftcot/judge/blinding.hpp"
#include "eftcot/judge/rubric.hpp"

namespace eftcot::judge {

enum class JudgeMode { Comparative, Absolute };

std::string_view to_string(JudgeMode m);
JudgeMode parse_judge_mode(std::string_view s);

/// Judge prompt for one dimension: rubric anchors, case text and every slot.
std::string render_rubric_prompt(const BlindedItem& item, const Rubric& rubric, const std::string& case_text);

class JudgeParseError : public Error {
public:
    using Error::Error;
};

/// Extracts "A: 5" style scores. The last occurrence per slot wins; every
/// slot needs an integer in 1..5.
std::map<std::string, int> parse_judge_score(std::string_view reply, const std::vector<std::string>& slots);

struct ScoreSheet {
    std::string case_id;
    std::string judge_id;
    Dimension dimension = Dimension::SomaticAwareness;
    /// System id to score in 1..5.
    std::map<std::string, int> scores;

    void validate() const;
    bool operator==(const ScoreSheet&) const = default;
};

ordered_json to_json(const ScoreSheet& s);
ScoreSheet score_sheet_from_json(const json& j);
std::vector<ScoreSheet> load_score_sheets(const std::filesystem::path& path);

/// Dimension to system to mean: over judges within a case, then over cases.
using PanelMeans = std::map<Dimension, std::map<std::string, double>>;
PanelMeans aggregate_panel(const std::vector<ScoreSheet>& sheets);

/// Half-up rounding to 2 decimals, tolerant of binary representation error.
double round2(double x);

/// System to case id to mean score over judges and the given dimensions.
using CaseScores = std::map<std::string, std::map<std::string, double>>;
CaseScores case_scores(const std::vector<ScoreSheet>& sheets, const std::vector<Dimension>& dimensions);

} // namespace eftcot::judge

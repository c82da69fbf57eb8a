#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eftcot/core/json_io.hpp"
#include "eftcot/judge/harness.hpp"
#include "eftcot/judge/stats.hpp"

namespace eftcot::judge {

struct ReportOptions {
    /// System compared against every other one for win rates and significance.
    std::string reference_system;
    double alpha = 0.05;
    std::size_t exact_cutoff = 25;
    TieMode tie_mode = TieMode::Half;
};

/// Row system beats column system: p-value of the one-sided test, absent on the diagonal.
struct SignificanceMatrix {
    std::vector<std::string> systems;
    std::vector<std::vector<std::optional<StatTestResult>>> cells;
};

SignificanceMatrix significance_matrix(const CaseScores& scores, const std::vector<std::string>& systems,
                                       double alpha, std::size_t exact_cutoff);

/// Rows are the given dimensions plus Average; columns are systems.
std::string render_dimension_rows(const PanelMeans& means, const std::vector<Dimension>& dims,
                                  const std::vector<std::string>& systems);
/// Rows are systems; columns are the given dimensions plus Avg.
std::string render_system_rows(const PanelMeans& means, const std::vector<Dimension>& dims,
                               const std::vector<std::string>& systems);
std::string render_significance(const SignificanceMatrix& m);

/// JSON report: mode, panel, means, win rates, significance and gaps, plus rendered tables.
ordered_json build_judge_report(const JudgeRun& run, const JudgeConfig& config, const ReportOptions& options);

/// Systems that appear in the sheets, reference first.
std::vector<std::string> systems_in(const std::vector<ScoreSheet>& sheets, const std::string& reference);

} // namespace eftcot::judge

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "eftcot/core/error.hpp"

namespace eftcot::judge {

enum class StatMethod { Exact, NormalApprox };
std::string_view to_string(StatMethod m);

struct StatTestResult {
    double statistic = 0.0;  // W+, sum of ranks of positive differences
    std::size_t n_effective = 0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool significant = false;
    StatMethod method = StatMethod::Exact;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

/// One-sided Wilcoxon signed-rank test of a > b. Zero differences are
/// dropped and tied magnitudes get average ranks. Exact null distribution when
/// n_effective <= exact_cutoff, otherwise the tie-corrected normal
/// approximation with a 0.5 continuity correction.
StatTestResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.05,
                                  std::size_t exact_cutoff = 25);

enum class Preference { A, B, Tie };
enum class TieMode { Half, Exclude };

/// A-wins over decided cases; ties count 0.5 or are dropped. 0 when nothing is counted.
double win_rate(const std::vector<Preference>& prefs, TieMode ties = TieMode::Half);

Preference prefer(double a, double b);

} // namespace eftcot::judge

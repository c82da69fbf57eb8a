#include "eftcot/judge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eftcot::judge {

std::string_view to_string(StatMethod m) { return m == StatMethod::Exact ? "exact" : "normal-approx"; }

StatTestResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b, double alpha,
                                  std::size_t exact_cutoff) {
    if (a.size() != b.size()) throw Error("wilcoxon: samples differ in length");
    if (a.empty()) throw DegenerateError("wilcoxon: empty samples");
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        if (diff != 0.0) d.push_back(diff);
    }
    const std::size_t n = d.size();
    if (n == 0) throw DegenerateError("wilcoxon: every difference is zero");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return std::fabs(d[x]) < std::fabs(d[y]); });

    // Ranks are kept doubled so tied averages stay integral.
    std::vector<std::size_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = (i + 1) + (j + 1);
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    std::size_t w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] > 0) w2 += rank2[i];
    }

    StatTestResult r;
    r.statistic = static_cast<double>(w2) / 2.0;
    r.n_effective = n;
    r.alpha = alpha;
    if (n <= exact_cutoff) {
        r.method = StatMethod::Exact;
        const std::size_t total = std::accumulate(rank2.begin(), rank2.end(), std::size_t{0});
        std::vector<long double> dist(total + 1, 0.0L);
        dist[0] = 1.0L;
        std::size_t reach = 0;
        for (std::size_t rk : rank2) {
            for (std::size_t s = reach + 1; s-- > 0;) {
                if (dist[s] != 0.0L) dist[s + rk] += dist[s];
            }
            reach += rk;
        }
        long double upper = 0.0L;
        for (std::size_t s = w2; s <= total; ++s) upper += dist[s];
        r.p_value = static_cast<double>(upper / std::pow(2.0L, static_cast<long double>(n)));
    } else {
        r.method = StatMethod::NormalApprox;
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = (r.statistic - mean - 0.5) / std::sqrt(var);
        r.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    }
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    r.significant = r.p_value < alpha;
    return r;
}

double win_rate(const std::vector<Preference>& prefs, TieMode ties) {
    double wins = 0.0, counted = 0.0;
    for (Preference p : prefs) {
        if (p == Preference::Tie) {
            if (ties == TieMode::Exclude) continue;
            wins += 0.5;
        } else if (p == Preference::A) {
            wins += 1.0;
        }
        counted += 1.0;
    }
    return counted == 0.0 ? 0.0 : wins / counted;
}

Preference prefer(double a, double b) {
    if (std::fabs(a - b) < 1e-12) return Preference::Tie;
    return a > b ? Preference::A : Preference::B;
}

} // namespace eftcot::judge

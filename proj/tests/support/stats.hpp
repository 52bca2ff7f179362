#pragma once

// Distribution-test helpers shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace teststat {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double exp_cdf(double x, double rate) { return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x); }

// One-sample Kolmogorov-Smirnov statistic against a fully specified CDF.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Asymptotic critical values: K(alpha) / sqrt(n_eff).
inline double ks_critical_1pct(size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline double ks2_critical_1pct(size_t n, size_t m) {
    return 1.628 * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                             (static_cast<double>(n) * static_cast<double>(m)));
}

inline double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace teststat

#include "adacp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace adacp {

namespace {

struct Moments {
    double cnt = 0, sx = 0, sxx = 0, sy = 0, sxy = 0, syy = 0;
};

Moments operator-(const Moments& a, const Moments& b) {
    return {a.cnt - b.cnt, a.sx - b.sx, a.sxx - b.sxx, a.sy - b.sy, a.sxy - b.sxy, a.syy - b.syy};
}

struct SideFit {
    bool valid = false;
    double rss = 0.0;
    std::vector<double> beta;
};

SideFit solve_side(const Moments& m, BasisKind basis, bool want_beta = false) {
    SideFit f;
    if (basis == BasisKind::Stump) {
        if (m.cnt < 1) return f;
        f.valid = true;
        f.rss = m.syy - m.sy * m.sy / m.cnt;
        if (want_beta) f.beta = {m.sy / m.cnt};
        return f;
    }
    if (m.cnt < 2) return f;
    const double det = m.cnt * m.sxx - m.sx * m.sx;
    if (!(det > 1e-12 * std::max(1.0, m.cnt * m.sxx))) return f;  // collinear side
    const double a = (m.sy * m.sxx - m.sx * m.sxy) / det;
    const double b = (m.cnt * m.sxy - m.sx * m.sy) / det;
    f.valid = true;
    f.rss = m.syy - a * m.sy - b * m.sxy;
    if (want_beta) f.beta = {a, b};
    return f;
}

struct SweepData {
    std::vector<Sample> sorted;
    std::vector<double> vals;       // distinct covariates, ascending
    std::vector<Moments> prefix;    // prefix[j] = moments of all samples with x <= vals[j]
    std::vector<double> fixed_gap;  // prefix of (a_i - b_i) at distinct boundaries (fit_fixed)
    double fixed_total_b = 0.0;
    Moments total;
    // candidate list: entry -1 encodes the window's lower edge (all-right split)
    std::vector<int> cand;          // indices into vals, or -1
    int base_prefix = -1;           // last distinct index with vals[idx] <= window.lo, or -1
};

SweepData prepare(std::span<const Sample> samples, const Window& window, bool with_fixed,
                  const std::vector<double>& beta_l, const std::vector<double>& beta_u,
                  BasisKind basis) {
    SweepData d;
    d.sorted.assign(samples.begin(), samples.end());
    std::sort(d.sorted.begin(), d.sorted.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });

    Moments run;
    double gap_run = 0.0;
    for (size_t i = 0; i < d.sorted.size(); ++i) {
        const Sample& s = d.sorted[i];
        run.cnt += 1.0;
        run.sx += s.x;
        run.sxx += s.x * s.x;
        run.sy += s.y;
        run.sxy += s.x * s.y;
        run.syy += s.y * s.y;
        if (with_fixed) {
            const double rl = s.y - basis_eval(basis, beta_l, s.x);
            const double ru = s.y - basis_eval(basis, beta_u, s.x);
            gap_run += rl * rl - ru * ru;
            d.fixed_total_b += ru * ru;
        }
        const bool boundary = (i + 1 == d.sorted.size()) || (d.sorted[i + 1].x != s.x);
        if (boundary) {
            d.vals.push_back(s.x);
            d.prefix.push_back(run);
            if (with_fixed) d.fixed_gap.push_back(gap_run);
        }
    }
    d.total = run;

    // base prefix: everything at or below the window's lower edge
    d.base_prefix = -1;
    for (size_t j = 0; j < d.vals.size() && d.vals[j] <= window.lo; ++j) d.base_prefix = static_cast<int>(j);

    d.cand.push_back(-1);
    for (size_t j = 0; j < d.vals.size(); ++j)
        if (d.vals[j] > window.lo && d.vals[j] <= window.hi) d.cand.push_back(static_cast<int>(j));
    return d;
}

// Given per-candidate criterion values (NaN = skipped), extract the smallest
// and largest minimizers under the value-or-left-limit convention.
struct ArgminOut {
    int first = -1, last = -1;
    double value = std::numeric_limits<double>::infinity();
};

ArgminOut scan_argmin(const std::vector<double>& crit) {
    ArgminOut out;
    for (size_t i = 0; i < crit.size(); ++i) {
        if (std::isnan(crit[i])) continue;
        if (crit[i] < out.value) {
            out.value = crit[i];
            out.first = static_cast<int>(i);
            out.last = static_cast<int>(i);
        } else if (crit[i] == out.value) {
            out.last = static_cast<int>(i);
        }
    }
    return out;
}

SplitFit finish(const SweepData& d, const Window& window, const ArgminOut& am) {
    SplitFit fit;
    const int ci = d.cand[am.first];
    fit.d_lo = ci < 0 ? window.lo : d.vals[ci];
    const int cl = d.cand[am.last];
    // next jump of the criterion after the last minimizing candidate
    int next = (cl < 0 ? 0 : cl + 1);
    // for the base candidate the next jump is the first distinct value above lo
    if (cl < 0)
        while (next < static_cast<int>(d.vals.size()) && d.vals[next] <= window.lo) ++next;
    if (next < static_cast<int>(d.vals.size()) && d.vals[next] <= window.hi)
        fit.d_hi = d.vals[next];
    else
        fit.d_hi = window.hi;
    fit.d_av = 0.5 * (fit.d_lo + fit.d_hi);
    fit.rss = std::max(0.0, am.value);
    return fit;
}

}  // namespace

SplitFit fit_free(std::span<const Sample> samples, const Window& window, BasisKind basis) {
    if (samples.size() < 2) throw InsufficientData("fit_free needs at least 2 samples");
    if (!(window.lo < window.hi)) throw DegenerateWindow("fit_free window has hi <= lo");
    SweepData d = prepare(samples, window, false, {}, {}, basis);

    auto sides_at = [&](int cand_idx, bool want_beta) -> std::pair<SideFit, SideFit> {
        const int j = d.cand[cand_idx] < 0 ? d.base_prefix : d.cand[cand_idx];
        const Moments left = j < 0 ? Moments{} : d.prefix[j];
        return {solve_side(left, basis, want_beta), solve_side(d.total - left, basis, want_beta)};
    };

    std::vector<double> crit(d.cand.size(), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < d.cand.size(); ++i) {
        auto [lf, rf] = sides_at(static_cast<int>(i), false);
        if (lf.valid && rf.valid) crit[i] = lf.rss + rf.rss;
    }

    const ArgminOut am = scan_argmin(crit);
    if (am.first < 0) throw AllCandidatesSkipped("fit_free: no candidate split leaves a well-posed fit on both sides");
    SplitFit fit = finish(d, window, am);
    auto [lf, rf] = sides_at(am.first, true);
    fit.beta_l = std::move(lf.beta);
    fit.beta_u = std::move(rf.beta);
    const double dof = d.total.cnt - 2.0 * basis_dim(basis);
    fit.sigma_hat = dof > 0 ? std::sqrt(fit.rss / dof) : 0.0;
    return fit;
}

SplitFit fit_fixed(std::span<const Sample> samples, const Window& window,
                   const std::vector<double>& beta_l, const std::vector<double>& beta_u,
                   BasisKind basis) {
    if (samples.empty()) throw EmptySampleSet("fit_fixed needs at least 1 sample");
    if (!(window.lo < window.hi)) throw DegenerateWindow("fit_fixed window has hi <= lo");
    SweepData d = prepare(samples, window, true, beta_l, beta_u, basis);

    std::vector<double> crit(d.cand.size());
    for (size_t i = 0; i < d.cand.size(); ++i) {
        const int j = d.cand[i] < 0 ? d.base_prefix : d.cand[i];
        const double gap = j < 0 ? 0.0 : d.fixed_gap[j];
        crit[i] = d.fixed_total_b + gap;
    }

    const ArgminOut am = scan_argmin(crit);
    SplitFit fit = finish(d, window, am);
    fit.beta_l = beta_l;
    fit.beta_u = beta_u;
    fit.sigma_hat = std::sqrt(fit.rss / d.total.cnt);
    return fit;
}

SplitFit classical_estimate(std::span<const Sample> samples, BasisKind basis, double eps0) {
    if (!(eps0 >= 0.0) || eps0 >= 0.5) throw ValidationError("classical_estimate: eps0 must lie in [0, 0.5)");
    return fit_free(samples, Window{eps0, 1.0 - eps0}, basis);
}

}  // namespace adacp

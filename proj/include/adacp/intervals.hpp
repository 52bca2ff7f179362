#pragma once

#include "adacp/cpp_limit.hpp"
#include "adacp/design.hpp"
#include "adacp/estimator.hpp"

namespace adacp {

enum class Center { DLo, DHi, DAv };
const char* center_name(Center c);

enum class CiFamily { Conservative, Exact, FiniteSample, Multistage };
const char* family_name(CiFamily f);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    double nominal_level = 0.0;
    CiFamily family = CiFamily::Exact;
    Center center = Center::DAv;
    // [lo,hi] clipped to [0,1]; coverage accounting uses the unclipped interval.
    bool clipped = false;
    double lo_clipped = 0.0;
    double hi_clipped = 0.0;

    double length() const { return hi - lo; }
    bool contains(double d0) const { return lo <= d0 && d0 <= hi; }
    nlohmann::json to_json() const;
};

double pick_center(const SplitFit& fit, Center c);

// Envelope interval: a and b are the tau/2 quantile of d_l and the 1-tau/2
// quantile of d_u of the limit law (canonical tables scaled by 1/C), so
// coverage is at least 1-tau whichever center is used.
ConfidenceInterval conservative_ci(const SplitFit& fit, const CppQuantiles& quantiles, double C,
                                   int64_t n2, double gamma, double tau, Center center);

// Same shape, but the quantiles are those of the statistic matching the
// chosen center, giving asymptotically exact 1-tau coverage.
ConfidenceInterval exact_ci(const SplitFit& fit, const CppQuantiles& quantiles, double C, int64_t n2,
                            double gamma, double tau, Center center);

// Allocation-calculus interval for the equal-allocation two-stage design:
// d_av +- 8 C_zeta1 C_{tau/2} / n^2. Length depends only on (n, C_zeta1,
// C_{tau/2}), so it is constant across replicates.
ConfidenceInterval finite_sample_ci(double d_av_final, int64_t n, double C_zeta1, double C_tau_half,
                                    double tau);

// Plan-checked variant: rejects plans that are not the two-stage equal
// allocation the derivation assumes.
ConfidenceInterval finite_sample_ci(const SplitFit& final_fit, const StagePlan& plan, int64_t n,
                                    const CppQuantiles& quantiles, double tau);

// Interval around the estimate after `completed_stages` stages with
// half-width 2^{q-1} C_{zeta_1}...C_{zeta_q} / (n^q lambda_1...lambda_q);
// the last factor's level is overridable (pass tau/2 for a 1-tau interval).
// With q = plan.stages-1 and the plan's own zeta it reproduces the next
// zoom-in window; with q=2, equal lambdas and last_zeta=tau/2 it reduces to
// the finite-sample interval.
ConfidenceInterval multistage_ci(int completed_stages, const StagePlan& plan,
                                 const CppQuantiles& quantiles, int64_t n, double d_av,
                                 double last_zeta);

}  // namespace adacp

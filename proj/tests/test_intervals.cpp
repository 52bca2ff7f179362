#include <doctest.h>

#include <cmath>

#include "adacp/intervals.hpp"
#include "adacp/harness.hpp"

using namespace adacp;

namespace {

const CppQuantiles& table5() {
    static const CppQuantiles q =
        estimate_quantiles(5.0, ErrorDist::Normal, 100000, default_prob_grid(), 4321, 0);
    return q;
}

SplitFit fit_at(double d_lo, double d_hi) {
    SplitFit f;
    f.d_lo = d_lo;
    f.d_hi = d_hi;
    f.d_av = 0.5 * (d_lo + d_hi);
    return f;
}

}  // namespace

TEST_CASE("conservative interval is symmetric for symmetric quantiles") {
    CppQuantiles q;
    q.prob_grid = {0.025, 0.5, 0.975};
    q.q_dl = {-2.0, -0.5, 2.0};
    q.q_du = {-2.0, 0.5, 2.0};
    q.q_dav = {-1.0, 0.0, 1.0};
    const SplitFit fit = fit_at(0.49, 0.51);
    const ConfidenceInterval ci = conservative_ci(fit, q, 0.5, 100, 0.5, 0.05, Center::DAv);
    CHECK(ci.hi - fit.d_av == doctest::Approx(fit.d_av - ci.lo).epsilon(1e-12));
    CHECK(ci.nominal_level == doctest::Approx(0.95));
    // displayed form: center -/+ quantile / (C * n2^{1+gamma})
    CHECK(ci.hi == doctest::Approx(fit.d_av + 2.0 / 0.5 / std::pow(100.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("exact intervals nest inside conservative ones") {
    const CppQuantiles& q = table5();
    const SplitFit fit = fit_at(0.498, 0.502);
    const double C = 0.5;
    const int64_t n2 = 500;
    const ConfidenceInterval cons = conservative_ci(fit, q, C, n2, 0.5, 0.05, Center::DAv);
    for (Center c : {Center::DLo, Center::DHi, Center::DAv}) {
        const ConfidenceInterval ex = exact_ci(fit, q, C, n2, 0.5, 0.05, c);
        CHECK(ex.length() <= cons.length() + 1e-15);
    }
    // pathwise quantile ordering a_l <= a_av <= a_u at each tabulated level
    for (size_t i = 0; i < q.prob_grid.size(); ++i) {
        CHECK(q.q_dl[i] <= q.q_dav[i] + 1e-12);
        CHECK(q.q_dav[i] <= q.q_du[i] + 1e-12);
    }
}

TEST_CASE("finite-sample interval length follows the n^2 law") {
    const ConfidenceInterval a = finite_sample_ci(0.5, 200, 4.0, 1.5, 0.05);
    const ConfidenceInterval b = finite_sample_ci(0.5, 400, 4.0, 1.5, 0.05);
    CHECK(a.length() == doctest::Approx(4.0 * b.length()).epsilon(1e-12));
    CHECK(a.length() == doctest::Approx(2.0 * 8.0 * 4.0 * 1.5 / (200.0 * 200.0)).epsilon(1e-12));
    CHECK(a.family == CiFamily::FiniteSample);
}

TEST_CASE("finite-sample interval rejects non-matching plans") {
    StagePlan plan = StagePlan::calculus(2, 0.001, 5.0);
    plan.lambda = {0.3, 0.7};
    CHECK_THROWS_AS((void)finite_sample_ci(fit_at(0.5, 0.5), plan, 200, table5(), 0.05), PlanMismatch);
    StagePlan three = StagePlan::calculus(3, 0.001, 5.0);
    CHECK_THROWS_AS((void)finite_sample_ci(fit_at(0.5, 0.5), three, 200, table5(), 0.05), PlanMismatch);
    const StagePlan ok = StagePlan::calculus(2, 0.001, 5.0);
    const ConfidenceInterval ci = finite_sample_ci(fit_at(0.5, 0.5), ok, 200, table5(), 0.05);
    CHECK(ci.length() > 0);
}

TEST_CASE("multistage interval reduces to the finite-sample one at q=2") {
    const CppQuantiles& q = table5();
    StagePlan plan = StagePlan::calculus(2, 0.001, 5.0);
    const ConfidenceInterval ms = multistage_ci(2, plan, q, 200, 0.5, 0.025);
    const ConfidenceInterval fs = finite_sample_ci(0.5, 200, q.C(plan.zeta[0]), q.C(0.025), 0.05);
    CHECK(ms.lo == doctest::Approx(fs.lo).epsilon(1e-12));
    CHECK(ms.hi == doctest::Approx(fs.hi).epsilon(1e-12));
}

TEST_CASE("multistage interval arithmetic at equal thirds") {
    const CppQuantiles& q = table5();
    StagePlan plan = StagePlan::calculus(3, 0.005, 5.0);
    const int64_t n = 900;
    const ConfidenceInterval ci = multistage_ci(3, plan, q, n, 0.5, plan.zeta[1]);
    const double hw = 4.0 * q.C(plan.zeta[0]) * q.C(plan.zeta[1]) * q.C(plan.zeta[1]) * 27.0 /
                      std::pow(static_cast<double>(n), 3.0);
    CHECK(0.5 * ci.length() == doctest::Approx(hw).epsilon(1e-12));
}

TEST_CASE("multistage interval equals the next zoom-in window") {
    // equality of the confidence neighborhood and the sampling window
    const CppQuantiles& q = table5();
    StagePlan plan = StagePlan::calculus(2, 0.001, 5.0);
    const int64_t n = 400;
    plan.K[0] = window_constant(2, plan, q, n);
    const double hw_window = stage_halfwidth(2, plan, n);
    const ConfidenceInterval ci = multistage_ci(1, plan, q, n, 0.5, plan.zeta[0]);
    CHECK(0.5 * ci.length() == doctest::Approx(hw_window).epsilon(1e-12));
}

TEST_CASE("multistage width shrinks with each stage in the operating regime") {
    const CppQuantiles& q = table5();
    StagePlan plan = StagePlan::calculus(4, 0.001, 5.0);
    const int64_t n = 2000;
    double prev = 1e300;
    for (int stage = 1; stage <= 4; ++stage) {
        const double z = stage < 4 ? plan.zeta[stage - 1] : 0.025;
        const ConfidenceInterval ci = multistage_ci(stage, plan, q, n, 0.5, z);
        CHECK(ci.length() < prev);
        prev = ci.length();
    }
}

TEST_CASE("intervals clip to the unit interval but cover unclipped") {
    const ConfidenceInterval ci = finite_sample_ci(0.001, 10, 4.0, 1.5, 0.05);
    CHECK(ci.lo < 0.0);
    CHECK(ci.clipped);
    CHECK(ci.lo_clipped == 0.0);
    CHECK(ci.contains(ci.lo + 1e-6));  // coverage accounting uses the unclipped interval
}

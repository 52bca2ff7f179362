#include "adacp/intervals.hpp"

#include <cmath>

namespace adacp {

const char* center_name(Center c) {
    switch (c) {
        case Center::DLo: return "d_lo";
        case Center::DHi: return "d_hi";
        case Center::DAv: return "d_av";
    }
    return "?";
}

const char* family_name(CiFamily f) {
    switch (f) {
        case CiFamily::Conservative: return "conservative";
        case CiFamily::Exact: return "exact";
        case CiFamily::FiniteSample: return "finite_sample";
        case CiFamily::Multistage: return "multistage";
    }
    return "?";
}

double pick_center(const SplitFit& fit, Center c) {
    switch (c) {
        case Center::DLo: return fit.d_lo;
        case Center::DHi: return fit.d_hi;
        case Center::DAv: return fit.d_av;
    }
    return fit.d_av;
}

nlohmann::json ConfidenceInterval::to_json() const {
    nlohmann::json j{{"lo", lo},
                     {"hi", hi},
                     {"nominal_level", nominal_level},
                     {"family", family_name(family)},
                     {"center", center_name(center)},
                     {"clipped", clipped}};
    if (clipped) {
        j["lo_clipped"] = lo_clipped;
        j["hi_clipped"] = hi_clipped;
    }
    return j;
}

namespace {

ConfidenceInterval make_interval(double center_value, double a, double b, double rate, double tau,
                                 CiFamily family, Center center) {
    ConfidenceInterval ci;
    ci.family = family;
    ci.center = center;
    ci.nominal_level = 1.0 - tau;
    ci.lo = center_value - b / rate;
    ci.hi = center_value - a / rate;
    ci.lo_clipped = std::max(0.0, ci.lo);
    ci.hi_clipped = std::min(1.0, ci.hi);
    ci.clipped = ci.lo_clipped != ci.lo || ci.hi_clipped != ci.hi;
    return ci;
}

void check_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0,1)");
}

}  // namespace

ConfidenceInterval conservative_ci(const SplitFit& fit, const CppQuantiles& quantiles, double C,
                                   int64_t n2, double gamma, double tau, Center center) {
    check_tau(tau);
    if (!(C > 0.0)) throw ValidationError("limit rate C must be > 0");
    const double a = quantiles.quantile_dl(0.5 * tau) / C;
    const double b = quantiles.quantile_du(1.0 - 0.5 * tau) / C;
    const double rate = std::pow(static_cast<double>(n2), 1.0 + gamma);
    return make_interval(pick_center(fit, center), a, b, rate, tau, CiFamily::Conservative, center);
}

ConfidenceInterval exact_ci(const SplitFit& fit, const CppQuantiles& quantiles, double C, int64_t n2,
                            double gamma, double tau, Center center) {
    check_tau(tau);
    if (!(C > 0.0)) throw ValidationError("limit rate C must be > 0");
    double a = 0.0, b = 0.0;
    switch (center) {
        case Center::DLo:
            a = quantiles.quantile_dl(0.5 * tau);
            b = quantiles.quantile_dl(1.0 - 0.5 * tau);
            break;
        case Center::DHi:
            a = quantiles.quantile_du(0.5 * tau);
            b = quantiles.quantile_du(1.0 - 0.5 * tau);
            break;
        case Center::DAv:
            a = quantiles.quantile_dav(0.5 * tau);
            b = quantiles.quantile_dav(1.0 - 0.5 * tau);
            break;
    }
    const double rate = std::pow(static_cast<double>(n2), 1.0 + gamma);
    return make_interval(pick_center(fit, center), a / C, b / C, rate, tau, CiFamily::Exact, center);
}

ConfidenceInterval finite_sample_ci(double d_av_final, int64_t n, double C_zeta1, double C_tau_half,
                                    double tau) {
    check_tau(tau);
    const double hw = 8.0 * C_zeta1 * C_tau_half / (static_cast<double>(n) * static_cast<double>(n));
    ConfidenceInterval ci = make_interval(d_av_final, -hw, hw, 1.0, tau, CiFamily::FiniteSample, Center::DAv);
    return ci;
}

ConfidenceInterval finite_sample_ci(const SplitFit& final_fit, const StagePlan& plan, int64_t n,
                                    const CppQuantiles& quantiles, double tau) {
    if (plan.stages != 2 || std::abs(plan.lambda[0] - 0.5) > 1e-9 || std::abs(plan.lambda[1] - 0.5) > 1e-9)
        throw PlanMismatch("the finite-sample interval assumes the equal-allocation two-stage design");
    return finite_sample_ci(final_fit.d_av, n, quantiles.C(plan.zeta[0]), quantiles.C(0.5 * tau), tau);
}

ConfidenceInterval multistage_ci(int completed_stages, const StagePlan& plan,
                                 const CppQuantiles& quantiles, int64_t n, double d_av,
                                 double last_zeta) {
    const int q = completed_stages;
    if (q < 1 || q > plan.stages) throw ValidationError("multistage_ci: completed stage count out of range");
    if (!(last_zeta > 0.0 && last_zeta < 0.5)) throw ValidationError("multistage_ci: last zeta must lie in (0,0.5)");
    double hw = std::pow(2.0, q - 1) / std::pow(static_cast<double>(n), q);
    for (int i = 0; i < q; ++i) {
        const double z = (i == q - 1) ? last_zeta : plan.zeta[i];
        if (i < q - 1 && static_cast<size_t>(i) >= plan.zeta.size())
            throw MissingQuantiles("plan has no zeta for stage " + std::to_string(i + 1));
        hw *= quantiles.C(z) / plan.lambda[i];
    }
    ConfidenceInterval ci =
        make_interval(d_av, -hw, hw, 1.0, 2.0 * last_zeta, CiFamily::Multistage, Center::DAv);
    return ci;
}

}  // namespace adacp

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "adacp/cpp_limit.hpp"
#include "adacp/estimator.hpp"
#include "adacp/model.hpp"

#include <json.hpp>

namespace adacp {

enum class DesignKind { RandomUniform, Equispaced, Density };
const char* design_name(DesignKind d);
DesignKind design_from_name(const std::string& name);

enum class CenterRule { DAv, DLo };

// P-stage sampling plan. gamma/zeta/K have one entry per zoom-in stage
// (stages 2..P); K entries may be NaN, in which case they are derived from
// the quantile calculus at run time (window_constant).
struct StagePlan {
    int stages = 2;
    std::vector<double> lambda;  // size P, sums to 1
    std::vector<double> gamma;   // size P-1, strictly decreasing, in (0,1)
    std::vector<double> zeta;    // size P-1, per-stage miss probabilities
    std::vector<double> K;       // size P-1, NaN => derive

    DesignKind first_stage = DesignKind::RandomUniform;
    DesignKind later_stage = DesignKind::RandomUniform;
    std::optional<SymmetricDensity> h;  // for later_stage == Density

    double snr = std::numeric_limits<double>::quiet_NaN();  // NaN => plug in from stage 1
    double eps0 = 0.0;               // stage-1 fit window is [eps0, 1-eps0]
    CenterRule center = CenterRule::DAv;
    bool reestimate_stump_params = false;  // pool (alpha, beta) from all samples so far

    void validate(int64_t n) const;
    double h0() const;  // sampling density value at the window center (in [-1,1] units)

    nlohmann::json to_json() const;
    static StagePlan from_json(const nlohmann::json& j);

    // Equal-allocation P-stage plan with all per-stage miss probabilities set
    // from the total miss budget delta.
    static StagePlan calculus(int stages, double delta, double snr);
    // Two-stage plan with explicit window constant K (no quantile calculus);
    // lambda1 defaults to the dispersion-optimal gamma/(1+gamma).
    static StagePlan fixed_k(double K, double gamma, double lambda1 = -1.0);
};

// psi such that running every zoom-in stage at miss level 2*zeta_q = psi
// traps d0 by stage P with probability 1 - delta.
double zeta_from_delta(int stages, double delta);

// Integer per-stage sample counts: largest-remainder rounding of lambda_q * n,
// ties resolved toward earlier stages.
std::vector<int64_t> stage_counts(const std::vector<double>& lambda, int64_t n);

// The K_{q-1} that makes the stage-q sampling window coincide with the level
// 1-2*zeta_{q-1} confidence neighborhood of the stage-(q-1) estimate.
// Real-valued stage sizes lambda_q*n are used inside the formula.
double window_constant(int q, const StagePlan& plan, const CppQuantiles& quantiles, int64_t n);

// Half-width K_{q-1} * (lambda_{q-1} n)^{-((q-2)+gamma_{q-1})} of the stage-q
// window; requires plan.K[q-2] to be resolved (finite).
double stage_halfwidth(int q, const StagePlan& plan, int64_t n);

// The stage-q sampling window centered at the previous stage's estimate,
// clipped to [0,1]; *preclip_width (if given) receives the nominal width.
Window stage_window(double prev_center, int q, const StagePlan& plan, int64_t n,
                    double* preclip_width = nullptr);

// Poisson rate of the limit process for the stage-q estimator:
// (2K_{q-1})^{-1} (lambda_{q-1}/lambda_q)^{(q-2)+gamma_{q-1}}, times the
// 2 h(0) correction when the later-stage design is a non-uniform density.
double limit_rate(int q, const StagePlan& plan);

struct StageRecord {
    Window window;            // clipped sampling window (stage 1: fit window)
    double preclip_width = 0.0;
    int64_t count = 0;
    double K_used = std::numeric_limits<double>::quiet_NaN();  // NaN for stage 1
    SplitFit fit;
    std::vector<Sample> samples;
};

struct RunResult {
    std::vector<StageRecord> stages;
    int64_t budget_used = 0;
    double sigma_hat_stage1 = 0.0;
    double snr_used = 0.0;  // plan.snr or the stage-1 plug-in estimate
    std::vector<int> window_missed;  // per stage, -1 unknown / 0 hit / 1 missed

    const SplitFit& final_fit() const { return stages.back().fit; }
    const StageRecord& final_stage() const { return stages.back(); }
    nlohmann::json to_json(bool include_samples = true) const;
};

// Runs the full adaptive experiment against the oracle: stage 1 draws on
// [0,1] and fits with free parameters; stages 2..P draw from the shrinking
// windows and refit with the stage-1 parameters frozen (unless the plan's
// stump re-estimation flag is set). `quantiles` is only consulted for stages
// whose K is not supplied. `true_d0`, when finite, fills window_missed.
RunResult run_experiment(Oracle& oracle, const StagePlan& plan, int64_t n, BasisKind basis,
                         RngStream& rng, QuantileProvider* quantiles = nullptr,
                         double true_d0 = std::numeric_limits<double>::quiet_NaN(),
                         bool keep_samples = false);

}  // namespace adacp

#pragma once

#include <string>
#include <vector>

#include "adacp/design.hpp"
#include "adacp/intervals.hpp"

namespace adacp {

// The reference simulation model: levels 0.5 / 1.5 split at d0 = 0.5 (unit
// jump), with sigma chosen so that |gap|/sigma = snr.
ChangePointModel reference_model(double snr, ErrorDist dist = ErrorDist::Normal);

// ---------------------------------------------------------------------------
// Coverage / length studies
// ---------------------------------------------------------------------------

enum class CoverageMode {
    FixedK,    // explicit K grid, lambda1 = gamma/(1+gamma), conservative + exact CIs
    Calculus,  // derived window constants, equal allocation, finite-sample CI
};

struct CoverageConfig {
    std::string label = "coverage";
    CoverageMode mode = CoverageMode::Calculus;
    std::vector<int64_t> budgets;
    std::vector<double> snrs{5.0};
    std::vector<double> gammas{0.5};  // FixedK: grid; Calculus: bookkeeping value
    std::vector<double> Ks{1.0};      // FixedK only
    double zeta1 = 0.0005;            // Calculus only
    double tau = 0.05;
    std::string family_filter;        // "" = all, else keep only this family's rows
    int64_t replicates = 2000;
    DesignKind first_stage = DesignKind::RandomUniform;
    DesignKind later_stage = DesignKind::RandomUniform;
    ErrorDist noise = ErrorDist::Normal;
    uint64_t seed = 1;
    int threads = 0;
};

struct CoverageCell {
    std::string study;
    int64_t n = 0;
    double snr = 0, gamma = 0, K = 0, lambda1 = 0, zeta1 = 0, tau = 0;
    std::string family, center, first_design, later_design;
    int64_t replicates = 0;
    double coverage = 0, mean_length = 0, miss_rate = 0;
};

// ---------------------------------------------------------------------------
// ARE studies
// ---------------------------------------------------------------------------

struct AreConfig {
    std::string label = "are";
    int stages = 2;
    std::vector<int64_t> budgets;
    std::vector<double> snrs{5.0};
    double zeta = 0.0025;  // every zoom-in stage uses this miss level
    int64_t replicates = 5000;
    int trim_per_tail = 5;
    double fx_d0 = 1.0;  // one-stage sampling density at d0
    ErrorDist noise = ErrorDist::Normal;
    uint64_t seed = 1;
    int threads = 0;
};

struct AreCell {
    std::string study;
    int64_t n = 0;
    double snr = 0;
    std::string measure;  // sd|mad|iqr, with _untrimmed suffix for the raw arm
    double empirical = 0;
    double theoretical = 0;
    int64_t replicates_used = 0;
};

// ---------------------------------------------------------------------------
// Allocation sweep
// ---------------------------------------------------------------------------

struct AllocationConfig {
    std::string label = "allocation";
    std::vector<double> lambda1_grid{0.3, 0.4, 0.5, 0.6, 0.7};
    int64_t n = 1000;
    double snr = 5.0;
    double zeta1 = 0.0005;
    int64_t replicates = 1000;
    int trim_per_tail = 5;
    ErrorDist noise = ErrorDist::Normal;
    uint64_t seed = 1;
    int threads = 0;
};

struct AllocationCell {
    std::string study;
    double lambda1 = 0;
    int64_t n = 0;
    double snr = 0;
    bool underflow = false;  // lambda_q * n < 4: recorded and skipped
    double sd = 0, sd_se = 0;
    int64_t replicates_used = 0;
};

// ---------------------------------------------------------------------------
// Convergence-rate study
// ---------------------------------------------------------------------------

struct RateConfig {
    std::string label = "rate";
    std::vector<int64_t> budgets{200, 400, 800, 1600};
    double snr = 5.0;
    double gamma = 0.5;
    double K = 1.0;
    double lambda1 = 0.5;
    int64_t replicates = 500;
    ErrorDist noise = ErrorDist::Normal;
    uint64_t seed = 1;
    int threads = 0;
};

struct RateCell {
    std::string study;
    int64_t n = 0;
    double median_abs_err = 0;
    int64_t replicates = 0;
};

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct McReport {
    std::vector<CoverageCell> coverage;
    std::vector<AreCell> are;
    std::vector<AllocationCell> allocation;
    std::vector<RateCell> rate;

    nlohmann::json to_json() const;
    static McReport from_json(const nlohmann::json& j);
    // One CSV per populated section, documented headers.
    std::string coverage_csv() const;
    std::string are_csv() const;
    std::string allocation_csv() const;
    std::string rate_csv() const;

    void append(const McReport& other);
};

McReport run_coverage_study(const CoverageConfig& cfg, QuantileProvider& quantiles);
McReport run_are_study(const AreConfig& cfg, QuantileProvider& quantiles);
McReport run_allocation_study(const AllocationConfig& cfg, QuantileProvider& quantiles);
McReport run_rate_study(const RateConfig& cfg);

// Least-squares slope of log(median |error|) against log(n).
double loglog_slope(const std::vector<RateCell>& cells);

// Named presets reproducing the published experiment grids.
struct McPreset {
    std::string name;
    std::vector<CoverageConfig> coverage;
    std::vector<AreConfig> are;
    std::vector<AllocationConfig> allocation;
    std::vector<RateConfig> rate;
};
McPreset mc_preset(const std::string& name, uint64_t seed, int threads);
std::vector<std::string> mc_preset_names();

// Dispersion measures used by the ARE studies.
double sample_sd(const std::vector<double>& xs);
double sample_mad(const std::vector<double>& xs);  // mean |x| (deviation about the truth)
double sample_iqr(std::vector<double> xs);

}  // namespace adacp

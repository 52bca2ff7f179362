#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "adacp/model.hpp"
#include "adacp/rng.hpp"

#include <json.hpp>

namespace adacp {

// Two-sided compound Poisson process: event gaps Exp(rate) on each side of 0,
// increments jump/2 + eta moving right and jump/2 - eta moving left, value 0
// at 0. Its smallest/largest argmins are the limit law of normalized
// change-point estimates.
struct CppParams {
    double jump = 1.0;   // A >= 0 (response units)
    double rate = 1.0;   // events per unit of local time, > 0
    ErrorDist eta = ErrorDist::Normal;
    double rho = 1.0;    // sd of eta (ignored for ErrorDist::None)

    void validate() const;
};

struct ArgminPair {
    double d_l = 0.0;
    double d_u = 0.0;
    double d_av() const { return 0.5 * (d_l + d_u); }
};

// Horizon control for the path simulator. A side stops once its running value
// sits cushion_mult * max(rho, jump/2) above the running minimum and at least
// min_events have occurred; each side has drift +jump/2 per event, so deeper
// excursions past that cushion have negligible probability (validated against
// a 10x horizon in the tests).
struct SimLimits {
    double cushion_mult = 40.0;
    int64_t min_events = 50;
    int64_t max_events = 10000000;
};

// Optional per-path trace for verification: event times and the path level on
// the stretch opened by each event.
struct PathTrace {
    std::vector<double> right_times, right_levels;  // level on [t_k, t_{k+1})
    std::vector<double> left_times, left_levels;    // level on [-e_{j+1}, -e_j), times are -e_j
    double min_value = 0.0;
};

ArgminPair simulate_path_argmin(const CppParams& params, RngStream& rng, const SimLimits& limits = {},
                                PathTrace* trace = nullptr);

// Relation between the general process and the canonical one: the argmin pair
// of the (jump, eta, rate) process equals 1/rate times the argmin pair of the
// unit-rate process with jump/rho and eta/rho.
ArgminPair scale_argmin(const ArgminPair& canonical, double rate);

// Monte Carlo quantile tables of d_l, d_u and (d_l+d_u)/2 for the canonical
// process (rate 1, sd 1, jump = snr).
struct CppQuantiles {
    double snr = 0.0;
    ErrorDist error_dist = ErrorDist::Normal;
    int64_t reps = 0;
    uint64_t seed = 0;
    std::vector<double> prob_grid;  // ascending
    std::vector<double> q_dl, q_du, q_dav;

    double quantile_dl(double p) const { return lookup(q_dl, p); }
    double quantile_du(double p) const { return lookup(q_du, p); }
    double quantile_dav(double p) const { return lookup(q_dav, p); }
    // Upper-zeta quantile of the average argmin; drives window sizing.
    double C(double zeta) const { return quantile_dav(1.0 - zeta); }

    nlohmann::json to_json() const;
    static CppQuantiles from_json(const nlohmann::json& j);

private:
    double lookup(const std::vector<double>& table, double p) const;
};

std::vector<double> default_prob_grid();

// Drops grid entries whose tails need more than `reps` paths to resolve
// (order-statistic quantiles want >= 10 expected tail exceedances).
std::vector<double> resolvable_prob_grid(std::vector<double> grid, int64_t reps);

CppQuantiles estimate_quantiles(double snr, ErrorDist error_dist, int64_t reps,
                                const std::vector<double>& prob_grid, uint64_t seed, int threads = 0,
                                const SimLimits& limits = {});

// Disk cache keyed by the full parameter tuple + seed; returns the cached
// table when present, otherwise simulates and writes it.
CppQuantiles quantiles_cached(const std::string& cache_dir, double snr, ErrorDist error_dist,
                              int64_t reps, uint64_t seed, int threads = 0);

// Serves canonical quantile tables to the planner/intervals.
class QuantileProvider {
public:
    virtual ~QuantileProvider() = default;
    virtual const CppQuantiles& at_snr(double snr) = 0;
};

// Provider backed by precomputed tables for an exact set of SNRs.
// Add every table before serving lookups from concurrent replicates.
class FixedQuantileProvider : public QuantileProvider {
public:
    void add(CppQuantiles q);
    const CppQuantiles& at_snr(double snr) override;

private:
    std::deque<CppQuantiles> tables_;
};

// Provider that simulates (and disk-caches) a table on first use per SNR;
// SNR is rounded to 3 decimals so plug-in estimates reuse tables.
class SimulatingQuantileProvider : public QuantileProvider {
public:
    SimulatingQuantileProvider(std::string cache_dir, int64_t reps, uint64_t seed, int threads = 0,
                               ErrorDist dist = ErrorDist::Normal);
    const CppQuantiles& at_snr(double snr) override;

private:
    std::string cache_dir_;
    int64_t reps_;
    uint64_t seed_;
    int threads_;
    ErrorDist dist_;
    std::mutex mu_;
    std::deque<CppQuantiles> tables_;  // deque: references stay valid as it grows
};

}  // namespace adacp

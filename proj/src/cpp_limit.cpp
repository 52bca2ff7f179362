#include "adacp/cpp_limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "adacp/parallel.hpp"

namespace adacp {

void CppParams::validate() const {
    if (!(rate > 0.0)) throw ValidationError("compound Poisson rate must be > 0");
    if (jump < 0.0) throw ValidationError("jump must be >= 0");
    if (eta != ErrorDist::None && !(rho > 0.0))
        throw ValidationError("eta sd must be > 0 (use error dist 'none' for the degenerate mode)");
}

namespace {

struct SideResult {
    double min_level = 0.0;     // min over post-event levels only; 0 if no event dips below
    bool has_min = false;       // true when some event level equals min_level
    double first_open = 0.0;    // stretch [open, close) of the first min-attaining level
    double first_close = 0.0;
    double last_open = 0.0;
    double last_close = 0.0;
    double first_event = 0.0;   // time of event 1 (bounds the central stretch)
};

// Simulates one side until the stopping rule certifies that no later event can
// undercut the running minimum. Returns stretch times as positive magnitudes.
SideResult simulate_side(const CppParams& p, RngStream& rng, const SimLimits& lim,
                         std::vector<double>* trace_times, std::vector<double>* trace_levels) {
    const double half = 0.5 * p.jump;
    const double cushion = lim.cushion_mult * std::max(p.eta == ErrorDist::None ? 0.0 : p.rho, half);
    if (!(cushion > 0.0))
        throw HorizonOverflow("degenerate parameters: zero drift and zero noise never certify a minimum");

    double t = 0.0, level = 0.0;
    double min_level = 0.0;
    bool has_min = false;
    // pending stretch bookkeeping: stretch k is [t_k, t_{k+1})
    double first_open = 0.0, last_open = 0.0;
    double first_close = -1.0, last_close = -1.0;  // -1 = waiting for the next event
    bool first_pending = false, last_pending = false;
    double first_event = 0.0;

    for (int64_t k = 1;; ++k) {
        if (k > lim.max_events)
            throw HorizonOverflow("compound Poisson path exceeded max_events without certifying its minimum");
        t += rng.exponential(p.rate);
        if (k == 1) first_event = t;
        if (first_pending && first_close < 0.0) first_close = t, first_pending = false;
        if (last_pending && last_close < 0.0) last_close = t, last_pending = false;
        level += half + (p.eta == ErrorDist::None ? 0.0 : p.rho * draw_unit_error(p.eta, rng));
        if (trace_times) {
            trace_times->push_back(t);
            trace_levels->push_back(level);
        }
        if (!has_min || level < min_level) {
            has_min = true;
            min_level = level;
            first_open = last_open = t;
            first_close = last_close = -1.0;
            first_pending = last_pending = true;
        } else if (level == min_level) {
            last_open = t;
            last_close = -1.0;
            last_pending = true;
        }
        const double floor_level = std::min(0.0, min_level);
        if (k >= lim.min_events && level - floor_level >= cushion && !first_pending && !last_pending) break;
    }

    SideResult r;
    r.min_level = min_level;
    r.has_min = has_min;
    r.first_open = first_open;
    r.first_close = first_close;
    r.last_open = last_open;
    r.last_close = last_close;
    r.first_event = first_event;
    return r;
}

}  // namespace

ArgminPair simulate_path_argmin(const CppParams& params, RngStream& rng, const SimLimits& limits,
                                PathTrace* trace) {
    params.validate();
    std::vector<double>*rt = nullptr, *rl = nullptr, *lt = nullptr, *ll = nullptr;
    if (trace) {
        trace->right_times.clear();
        trace->right_levels.clear();
        trace->left_times.clear();
        trace->left_levels.clear();
        rt = &trace->right_times;
        rl = &trace->right_levels;
        lt = &trace->left_times;
        ll = &trace->left_levels;
    }
    // independent substream per side: extending one side's horizon must not
    // perturb the other side's draws
    RngStream right_rng = rng.split(0x52u);
    RngStream left_rng = rng.split(0x4Cu);
    const SideResult right = simulate_side(params, right_rng, limits, rt, rl);
    const SideResult left = simulate_side(params, left_rng, limits, lt, ll);
    if (trace)
        for (auto& t : trace->left_times) t = -t;

    const double m = std::min({0.0, right.has_min ? right.min_level : 0.0, left.has_min ? left.min_level : 0.0});

    ArgminPair out;
    // Smallest minimizer: left side stretches lie left of the central stretch,
    // which lies left of the right side's. On the left side, the stretch
    // opened by event j covers [-e_{j+1}, -e_j]; its most negative minimizing
    // stretch is the last one recorded (largest event index).
    if (left.has_min && left.min_level == m)
        out.d_l = -left.last_close;  // close time of stretch = next event outward = interval's left end
    else if (m == 0.0)
        out.d_l = -left.first_event;
    else
        out.d_l = right.first_open;

    if (right.has_min && right.min_level == m)
        out.d_u = right.last_close;
    else if (m == 0.0)
        out.d_u = right.first_event;
    else
        out.d_u = -left.first_open;

    if (trace) trace->min_value = m;
    return out;
}

ArgminPair scale_argmin(const ArgminPair& canonical, double rate) {
    if (!(rate > 0.0)) throw ValidationError("scale_argmin needs rate > 0");
    return ArgminPair{canonical.d_l / rate, canonical.d_u / rate};
}

std::vector<double> default_prob_grid() {
    std::vector<double> g;
    const double tails[] = {0.0001, 0.00025, 0.0005, 0.001, 0.0025, 0.005, 0.01, 0.025, 0.05};
    for (double t : tails) g.push_back(t);
    for (int i = 2; i <= 18; ++i) g.push_back(0.05 * i);
    for (double t : tails) g.push_back(1.0 - t);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<double> resolvable_prob_grid(std::vector<double> grid, int64_t reps) {
    const double min_tail = 10.0 / static_cast<double>(reps) * (1.0 - 1e-6);
    std::erase_if(grid, [&](double p) { return std::min(p, 1.0 - p) < min_tail; });
    return grid;
}

double CppQuantiles::lookup(const std::vector<double>& table, double p) const {
    if (prob_grid.empty()) throw MissingQuantiles("empty quantile table");
    if (p <= prob_grid.front()) {
        if (p < prob_grid.front() - 1e-12)
            throw MissingQuantiles("requested probability " + std::to_string(p) + " below tabulated grid");
        return table.front();
    }
    if (p >= prob_grid.back()) {
        if (p > prob_grid.back() + 1e-12)
            throw MissingQuantiles("requested probability " + std::to_string(p) + " above tabulated grid");
        return table.back();
    }
    auto it = std::lower_bound(prob_grid.begin(), prob_grid.end(), p);
    const size_t hi = static_cast<size_t>(it - prob_grid.begin());
    if (std::abs(prob_grid[hi] - p) <= 1e-12) return table[hi];
    const size_t lo = hi - 1;
    if (std::abs(prob_grid[lo] - p) <= 1e-12) return table[lo];
    const double f = (p - prob_grid[lo]) / (prob_grid[hi] - prob_grid[lo]);
    return table[lo] + f * (table[hi] - table[lo]);
}

nlohmann::json CppQuantiles::to_json() const {
    return nlohmann::json{{"version", 1},
                          {"snr", snr},
                          {"error_dist", error_dist_name(error_dist)},
                          {"reps", reps},
                          {"seed", seed},
                          {"prob_grid", prob_grid},
                          {"q_dl", q_dl},
                          {"q_du", q_du},
                          {"q_dav", q_dav}};
}

CppQuantiles CppQuantiles::from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw ValidationError("unsupported quantile cache version");
    CppQuantiles q;
    q.snr = j.at("snr").get<double>();
    q.error_dist = error_dist_from_name(j.at("error_dist").get<std::string>());
    q.reps = j.at("reps").get<int64_t>();
    q.seed = j.at("seed").get<uint64_t>();
    q.prob_grid = j.at("prob_grid").get<std::vector<double>>();
    q.q_dl = j.at("q_dl").get<std::vector<double>>();
    q.q_du = j.at("q_du").get<std::vector<double>>();
    q.q_dav = j.at("q_dav").get<std::vector<double>>();
    const size_t n = q.prob_grid.size();
    if (q.q_dl.size() != n || q.q_du.size() != n || q.q_dav.size() != n)
        throw ValidationError("quantile cache tables disagree with the probability grid");
    return q;
}

namespace {

// Order-statistic (type-1) quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p) {
    const int64_t n = static_cast<int64_t>(sorted.size());
    int64_t k = static_cast<int64_t>(std::ceil(p * static_cast<double>(n))) - 1;
    k = std::clamp<int64_t>(k, 0, n - 1);
    return sorted[k];
}

}  // namespace

CppQuantiles estimate_quantiles(double snr, ErrorDist error_dist, int64_t reps,
                                const std::vector<double>& prob_grid, uint64_t seed, int threads,
                                const SimLimits& limits) {
    if (prob_grid.empty()) throw ValidationError("probability grid must be nonempty");
    for (size_t i = 0; i < prob_grid.size(); ++i) {
        if (prob_grid[i] <= 0.0 || prob_grid[i] >= 1.0)
            throw ValidationError("probability grid entries must lie in (0,1)");
        if (i > 0 && prob_grid[i] <= prob_grid[i - 1])
            throw ValidationError("probability grid must be strictly increasing");
    }
    const double tail = std::min(prob_grid.front(), 1.0 - prob_grid.back());
    const auto needed = static_cast<int64_t>(std::ceil(10.0 / tail * (1.0 - 1e-6)));
    if (reps < needed)
        throw InsufficientReps("reps=" + std::to_string(reps) + " too small for tail probability " +
                               std::to_string(tail) + " (need >= " + std::to_string(needed) + ")");

    CppParams params;
    params.jump = snr;
    params.rate = 1.0;
    params.eta = error_dist;
    params.rho = 1.0;
    params.validate();

    std::vector<double> dl(reps), du(reps), dav(reps);
    RngStream root(seed);
    parallel_for(reps, threads, [&](int64_t i) {
        RngStream rng = root.split(0x71u, static_cast<uint64_t>(i));
        const ArgminPair a = simulate_path_argmin(params, rng, limits);
        dl[i] = a.d_l;
        du[i] = a.d_u;
        dav[i] = a.d_av();
    });
    std::sort(dl.begin(), dl.end());
    std::sort(du.begin(), du.end());
    std::sort(dav.begin(), dav.end());

    CppQuantiles q;
    q.snr = snr;
    q.error_dist = error_dist;
    q.reps = reps;
    q.seed = seed;
    q.prob_grid = prob_grid;
    q.q_dl.reserve(prob_grid.size());
    q.q_du.reserve(prob_grid.size());
    q.q_dav.reserve(prob_grid.size());
    for (double p : prob_grid) {
        q.q_dl.push_back(sorted_quantile(dl, p));
        q.q_du.push_back(sorted_quantile(du, p));
        q.q_dav.push_back(sorted_quantile(dav, p));
    }
    return q;
}

CppQuantiles quantiles_cached(const std::string& cache_dir, double snr, ErrorDist error_dist,
                              int64_t reps, uint64_t seed, int threads) {
    namespace fs = std::filesystem;
    fs::create_directories(cache_dir);
    char name[160];
    std::snprintf(name, sizeof(name), "cpq_snr%.6g_%s_r%lld_s%llu.json", snr, error_dist_name(error_dist),
                  static_cast<long long>(reps), static_cast<unsigned long long>(seed));
    const fs::path path = fs::path(cache_dir) / name;
    if (fs::exists(path)) {
        std::ifstream in(path);
        nlohmann::json j;
        in >> j;
        return CppQuantiles::from_json(j);
    }
    CppQuantiles q =
        estimate_quantiles(snr, error_dist, reps, resolvable_prob_grid(default_prob_grid(), reps), seed, threads);
    std::ofstream out(path);
    out << q.to_json().dump(2) << "\n";
    return q;
}

void FixedQuantileProvider::add(CppQuantiles q) { tables_.push_back(std::move(q)); }

const CppQuantiles& FixedQuantileProvider::at_snr(double snr) {
    for (const auto& t : tables_)
        if (std::abs(t.snr - snr) <= 1e-9 * std::max(1.0, std::abs(snr))) return t;
    throw MissingQuantiles("no quantile table for snr=" + std::to_string(snr));
}

SimulatingQuantileProvider::SimulatingQuantileProvider(std::string cache_dir, int64_t reps, uint64_t seed,
                                                       int threads, ErrorDist dist)
    : cache_dir_(std::move(cache_dir)), reps_(reps), seed_(seed), threads_(threads), dist_(dist) {}

const CppQuantiles& SimulatingQuantileProvider::at_snr(double snr) {
    const double key = std::round(snr * 1000.0) / 1000.0;
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& t : tables_)
        if (t.snr == key) return t;
    tables_.push_back(quantiles_cached(cache_dir_, key, dist_, reps_, seed_, threads_));
    return tables_.back();
}

}  // namespace adacp

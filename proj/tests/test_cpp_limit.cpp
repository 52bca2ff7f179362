#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "adacp/cpp_limit.hpp"
#include "adacp/parallel.hpp"
#include "support/stats.hpp"

using namespace adacp;

namespace {

std::vector<ArgminPair> simulate_many(const CppParams& p, int64_t reps, uint64_t seed,
                                      const SimLimits& lim = {}) {
    std::vector<ArgminPair> out(reps);
    RngStream root(seed);
    parallel_for(reps, 0, [&](int64_t i) {
        RngStream rng = root.split(0x71u, static_cast<uint64_t>(i));
        out[i] = simulate_path_argmin(p, rng, lim);
    });
    return out;
}

std::vector<double> component(const std::vector<ArgminPair>& ps, int which) {
    std::vector<double> v(ps.size());
    for (size_t i = 0; i < ps.size(); ++i)
        v[i] = which == 0 ? ps[i].d_l : which == 1 ? ps[i].d_u : ps[i].d_av();
    return v;
}

}  // namespace

TEST_CASE("zero-noise argmins follow the exponential closed form") {
    CppParams p;
    p.jump = 1.0;
    p.rate = 1.0;
    p.eta = ErrorDist::None;
    const auto paths = simulate_many(p, 30000, 13);
    auto du = component(paths, 1);
    auto dl = component(paths, 0);
    for (auto& x : dl) x = -x;
    CHECK(teststat::ks_one_sample(du, [](double x) { return teststat::exp_cdf(x, 1.0); }) <
          teststat::ks_critical_1pct(du.size()));
    CHECK(teststat::ks_one_sample(dl, [](double x) { return teststat::exp_cdf(x, 1.0); }) <
          teststat::ks_critical_1pct(dl.size()));
    double mean_width = 0;
    for (const auto& a : paths) mean_width += a.d_u - a.d_l;
    mean_width /= static_cast<double>(paths.size());
    CHECK(mean_width == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("high snr concentrates the argmin around the origin") {
    CppParams p;
    p.jump = 5.0;  // snr 5 at unit rho
    const auto paths = simulate_many(p, 20000, 12);
    int64_t inside = 0;
    for (const auto& a : paths) inside += (a.d_l <= 0.0 && 0.0 <= a.d_u);
    CHECK(static_cast<double>(inside) / static_cast<double>(paths.size()) >= 0.9);
}

TEST_CASE("scale_argmin applies the rate relation") {
    CHECK(scale_argmin({-0.8, 0.4}, 1.0).d_l == doctest::Approx(-0.8));
    CHECK(scale_argmin({-0.8, 0.4}, 2.0).d_l == doctest::Approx(-0.4));
    CHECK(scale_argmin({-0.8, 0.4}, 2.0).d_u == doctest::Approx(0.2));
}

TEST_CASE("direct simulation matches scaled canonical simulation in law") {
    struct Config {
        double A, rho, lam;
    };
    for (const Config c : {Config{1, 1, 1}, Config{5, 1, 2}, Config{2, 0.5, 0.5}}) {
        CppParams direct;
        direct.jump = c.A;
        direct.rho = c.rho;
        direct.rate = c.lam;
        CppParams canon;
        canon.jump = c.A / c.rho;
        canon.rho = 1.0;
        canon.rate = 1.0;
        const int64_t reps = 30000;
        auto d1 = component(simulate_many(direct, reps, 21), 2);
        auto d2 = component(simulate_many(canon, reps, 22), 2);
        for (auto& x : d2) x /= c.lam;
        CHECK(teststat::ks_two_sample(d1, d2) < teststat::ks2_critical_1pct(reps, reps));
    }
}

TEST_CASE("average argmin is symmetric about zero") {
    CppParams p;
    p.jump = 2.0;
    const int64_t reps = 30000;
    auto a = component(simulate_many(p, reps, 31), 2);
    auto b = a;
    for (auto& x : b) x = -x;
    CHECK(teststat::ks_two_sample(a, b) < teststat::ks2_critical_1pct(reps, reps));
}

TEST_CASE("argmins attain the recorded path minimum exactly") {
    CppParams p;
    p.jump = 1.5;
    p.rho = 1.0;
    RngStream root(41);
    PathTrace trace;
    for (int i = 0; i < 300; ++i) {
        RngStream rng = root.split(i);
        const ArgminPair a = simulate_path_argmin(p, rng, {}, &trace);
        // recompute the global minimum from the trace
        double m = 0.0;
        for (double v : trace.right_levels) m = std::min(m, v);
        for (double v : trace.left_levels) m = std::min(m, v);
        CHECK(m == trace.min_value);
        // the path value on the stretch opening at d_l equals the minimum,
        // and the stretch closing at d_u holds it as its left limit
        // cadlag evaluation: right stretches are closed on the left at event
        // times; left-side stretch j covers [-e_{j+1}, -e_j), so the value at
        // an exact left event time -e_k belongs to the shallower stretch
        auto level_at = [&](double t) {
            double level = 0.0;
            if (t >= 0) {
                for (size_t k = 0; k < trace.right_times.size(); ++k)
                    if (trace.right_times[k] <= t) level = trace.right_levels[k];
            } else {
                for (size_t k = 0; k < trace.left_times.size(); ++k)
                    if (trace.left_times[k] > t) level = trace.left_levels[k];
            }
            return level;
        };
        CHECK(level_at(a.d_l) == m);
        CHECK(level_at(std::nextafter(a.d_u, a.d_l)) == m);
    }
}

TEST_CASE("stopping rule matches a 10x horizon") {
    CppParams p;
    p.jump = 2.0;
    SimLimits longer;
    longer.cushion_mult = 400.0;
    longer.min_events = 500;
    RngStream root(51);
    for (int i = 0; i < 10000; ++i) {
        RngStream r1 = root.split(i);
        RngStream r2 = root.split(i);  // identical stream: shared draw prefix
        const ArgminPair a = simulate_path_argmin(p, r1);
        const ArgminPair b = simulate_path_argmin(p, r2, longer);
        CHECK(a.d_l == b.d_l);
        CHECK(a.d_u == b.d_u);
    }
}

TEST_CASE("degenerate parameters overflow the horizon") {
    CppParams p;
    p.jump = 0.0;
    p.eta = ErrorDist::None;
    RngStream rng(61);
    CHECK_THROWS_AS((void)simulate_path_argmin(p, rng), HorizonOverflow);
    p.eta = ErrorDist::Normal;
    SimLimits lim;
    lim.max_events = 100;  // zero drift random walk cannot certify this fast
    CHECK_THROWS_AS((void)simulate_path_argmin(p, rng, lim), HorizonOverflow);
}

TEST_CASE("quantile tables are monotone and antisymmetric") {
    std::vector<double> grid;
    for (int i = 1; i <= 39; ++i) grid.push_back(0.025 * i);
    const CppQuantiles q = estimate_quantiles(5.0, ErrorDist::Normal, 40000, grid, 71);
    for (size_t i = 1; i < grid.size(); ++i) {
        CHECK(q.q_dl[i] >= q.q_dl[i - 1]);
        CHECK(q.q_du[i] >= q.q_du[i - 1]);
        CHECK(q.q_dav[i] >= q.q_dav[i - 1]);
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        const double mirror = q.quantile_dav(1.0 - grid[i]);
        CHECK(q.q_dav[i] == doctest::Approx(-mirror).epsilon(0.08));
    }
    // median of the average argmin is near zero
    CHECK(std::abs(q.quantile_dav(0.5)) < 3.0 / std::sqrt(40000.0) * 2.0);
    // pathwise ordering transfers to every quantile level
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(q.q_dl[i] <= q.q_dav[i] + 1e-12);
        CHECK(q.q_dav[i] <= q.q_du[i] + 1e-12);
    }
}

TEST_CASE("large snr reproduces the zero-noise quartile") {
    std::vector<double> grid{0.05, 0.25, 0.5, 0.75, 0.95};
    const CppQuantiles q = estimate_quantiles(50.0, ErrorDist::Normal, 20000, grid, 81);
    const double analytic = std::log(2.0) / 2.0;  // upper quartile of (E2-E1)/2
    CHECK(q.C(0.25) == doctest::Approx(analytic).epsilon(0.10));
}

TEST_CASE("insufficient reps are rejected") {
    CHECK_THROWS_AS(
        (void)estimate_quantiles(5.0, ErrorDist::Normal, 10000, std::vector<double>{0.0005, 0.5, 0.9995}, 1),
        InsufficientReps);
}

TEST_CASE("quantile cache round-trips through disk") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "adacp_qcache_test").string();
    fs::remove_all(dir);
    const CppQuantiles a = quantiles_cached(dir, 3.0, ErrorDist::Normal, 120000, 91, 0);
    const CppQuantiles b = quantiles_cached(dir, 3.0, ErrorDist::Normal, 120000, 91, 0);  // from disk
    CHECK(a.prob_grid == b.prob_grid);
    CHECK(a.q_dl == b.q_dl);
    CHECK(a.q_du == b.q_du);
    CHECK(a.q_dav == b.q_dav);
    CHECK(b.reps == 120000);
    fs::remove_all(dir);
}

TEST_CASE("quantile estimation is independent of the thread count") {
    std::vector<double> grid{0.1, 0.25, 0.5, 0.75, 0.9};
    const CppQuantiles a = estimate_quantiles(2.0, ErrorDist::Normal, 4000, grid, 101, 1);
    const CppQuantiles b = estimate_quantiles(2.0, ErrorDist::Normal, 4000, grid, 101, 2);
    CHECK(a.q_dl == b.q_dl);
    CHECK(a.q_du == b.q_du);
    CHECK(a.q_dav == b.q_dav);
}

#include <doctest.h>

#include "adacp/harness.hpp"

using namespace adacp;

namespace {

FixedQuantileProvider& provider5() {
    static FixedQuantileProvider* p = [] {
        auto* prov = new FixedQuantileProvider();
        prov->add(estimate_quantiles(5.0, ErrorDist::Normal, 100000, default_prob_grid(), 5150, 0));
        return prov;
    }();
    return *p;
}

}  // namespace

TEST_CASE("coverage study is deterministic across reruns and thread counts") {
    CoverageConfig cfg;
    cfg.label = "det";
    cfg.mode = CoverageMode::Calculus;
    cfg.budgets = {60};
    cfg.snrs = {5.0};
    cfg.zeta1 = 0.0025;
    cfg.replicates = 150;
    cfg.seed = 99;
    cfg.threads = 1;
    const McReport a = run_coverage_study(cfg, provider5());
    cfg.threads = 2;
    const McReport b = run_coverage_study(cfg, provider5());
    CHECK(a.coverage_csv() == b.coverage_csv());
    const McReport c = run_coverage_study(cfg, provider5());
    CHECK(b.coverage_csv() == c.coverage_csv());
    CHECK(a.coverage.size() == 1);
    CHECK(a.coverage[0].coverage >= 0.8);
}

TEST_CASE("report json round-trips to identical aggregates") {
    CoverageConfig cfg;
    cfg.mode = CoverageMode::Calculus;
    cfg.budgets = {60};
    cfg.zeta1 = 0.0025;
    cfg.replicates = 120;
    cfg.seed = 7;
    McReport r = run_coverage_study(cfg, provider5());
    RateConfig rc;
    rc.budgets = {100, 200};
    rc.replicates = 120;
    rc.seed = 7;
    r.append(run_rate_study(rc));
    const McReport back = McReport::from_json(r.to_json());
    CHECK(back.to_json() == r.to_json());
    CHECK(back.coverage_csv() == r.coverage_csv());
    CHECK(back.rate_csv() == r.rate_csv());
}

TEST_CASE("trimming cannot worsen the multistage dispersion in an outlier regime") {
    AreConfig cfg;
    cfg.stages = 2;
    cfg.budgets = {300};
    cfg.snrs = {5.0};
    cfg.zeta = 0.01;  // high miss level: outliers guaranteed
    cfg.replicates = 300;
    cfg.trim_per_tail = 5;
    cfg.seed = 15;
    const McReport r = run_are_study(cfg, provider5());
    auto value = [&](const std::string& m) {
        for (const auto& c : r.are)
            if (c.measure == m) return c.empirical;
        FAIL("missing measure ", m);
        return 0.0;
    };
    CHECK(value("sd") >= value("sd_untrimmed"));
    CHECK(value("mad") >= value("mad_untrimmed"));
    CHECK(value("iqr") >= value("iqr_untrimmed"));
    for (const auto& c : r.are) CHECK(c.theoretical == doctest::Approx(300.0 / (8.0 * provider5().at_snr(5.0).C(0.01))));
}

TEST_CASE("three-stage efficiency tracks the analytic curve") {
    AreConfig cfg;
    cfg.stages = 3;
    cfg.budgets = {600};
    cfg.snrs = {5.0};
    cfg.zeta = 0.0025;
    cfg.replicates = 800;
    cfg.trim_per_tail = 3;
    cfg.seed = 28;
    const McReport r = run_are_study(cfg, provider5());
    const double c = provider5().at_snr(5.0).C(0.0025);
    const double theory = 600.0 * 600.0 / (4.0 * 27.0 * c * c);
    double iqr = 0, mad = 0;
    for (const auto& cell : r.are) {
        if (cell.measure == "iqr") iqr = cell.empirical;
        if (cell.measure == "mad") mad = cell.empirical;
        CHECK(cell.theoretical == doctest::Approx(theory).epsilon(1e-9));
    }
    CHECK(iqr == doctest::Approx(theory).epsilon(0.35));
    CHECK(mad == doctest::Approx(theory).epsilon(0.35));
}

TEST_CASE("allocation study records underflow cells") {
    AllocationConfig cfg;
    cfg.lambda1_grid = {0.002, 0.5};
    cfg.n = 1000;
    cfg.replicates = 120;
    cfg.seed = 3;
    const McReport r = run_allocation_study(cfg, provider5());
    REQUIRE(r.allocation.size() == 2);
    CHECK(r.allocation[0].underflow);
    CHECK(r.allocation[0].replicates_used == 0);
    CHECK(!r.allocation[1].underflow);
    CHECK(r.allocation[1].sd > 0);
}

TEST_CASE("log-log slope recovers a pure power law") {
    std::vector<RateCell> cells;
    for (int64_t n : {100, 200, 400, 800}) {
        RateCell c;
        c.n = n;
        c.median_abs_err = 3.7 * std::pow(static_cast<double>(n), -1.5);
        cells.push_back(c);
    }
    CHECK(loglog_slope(cells) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("presets build and unknown names are rejected") {
    for (const std::string& name : mc_preset_names()) {
        const McPreset p = mc_preset(name, 1, 1);
        CHECK(p.name == name);
        CHECK(p.coverage.size() + p.are.size() + p.allocation.size() + p.rate.size() == 1);
    }
    CHECK_THROWS_AS((void)mc_preset("table9", 1, 1), ValidationError);
    // fig2 grid: n from 50 to 1500 in steps of 50
    const McPreset fig2 = mc_preset("fig2", 1, 1);
    REQUIRE(fig2.are.size() == 1);
    CHECK(fig2.are[0].budgets.size() == 30);
    CHECK(fig2.are[0].budgets.front() == 50);
    CHECK(fig2.are[0].budgets.back() == 1500);
    // table2 keeps only exact rows, table1 only conservative
    CHECK(mc_preset("table1", 1, 1).coverage[0].family_filter == "conservative");
    CHECK(mc_preset("table2", 1, 1).coverage[0].family_filter == "exact");
}

TEST_CASE("reference model matches the requested snr") {
    const ChangePointModel m = reference_model(4.0);
    CHECK(m.jump_gap() == doctest::Approx(1.0));
    CHECK(m.snr() == doctest::Approx(4.0));
    CHECK(m.d0 == 0.5);
    CHECK_THROWS_AS((void)reference_model(0.0), ValidationError);
}

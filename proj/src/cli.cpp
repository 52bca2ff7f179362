#include "adacp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "adacp/harness.hpp"
#include "adacp/json_util.hpp"

namespace adacp {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write output file '" + path + "'");
    out << text;
}

void check_schema_version(const json& j) {
    if (j.value("schema_version", 0) != 1)
        throw ValidationError("config needs \"schema_version\": 1");
}

ChangePointModel model_from_json(const json& j) {
    check_keys(j, {"d0", "basis", "beta_l", "beta_u", "noise", "eps0"}, "model");
    ChangePointModel m;
    m.d0 = j.at("d0").get<double>();
    m.basis = basis_from_name(j.value("basis", "stump"));
    m.beta_l = j.at("beta_l").get<std::vector<double>>();
    m.beta_u = j.at("beta_u").get<std::vector<double>>();
    if (j.contains("eps0")) m.eps0 = j.at("eps0").get<double>();
    if (j.contains("noise")) {
        const json& nj = j.at("noise");
        check_keys(nj, {"sigma", "dist", "sigma_affine"}, "model.noise");
        if (nj.contains("sigma")) m.noise.sigma = nj.at("sigma").get<double>();
        if (nj.contains("dist")) m.noise.dist = error_dist_from_name(nj.at("dist"));
        if (nj.contains("sigma_affine")) {
            const auto c = nj.at("sigma_affine").get<std::vector<double>>();
            if (c.size() != 2) throw ValidationError("sigma_affine needs exactly [intercept, slope]");
            if (c[0] <= 0.0 || c[0] + c[1] <= 0.0)
                throw ValidationError("sigma_affine must be positive on [0,1]");
            m.noise.sigma_fn = [c](double x) { return c[0] + c[1] * x; };
        }
    }
    m.validate();
    return m;
}

struct OracleSpec {
    std::string kind;  // model | pool | exec
    std::string arg;
};

OracleSpec parse_oracle_spec(const std::string& s) {
    if (s == "model") return {"model", ""};
    if (s.rfind("pool:", 0) == 0) return {"pool", s.substr(5)};
    if (s.rfind("exec:", 0) == 0) return {"exec", s.substr(5)};
    throw ValidationError("oracle must be model, pool:PATH or exec:CMD");
}

// ---------------------------------------------------------------------------
// quantiles
// ---------------------------------------------------------------------------

struct QuantilesArgs {
    double snr = 5.0;
    int64_t reps = 2000000;
    uint64_t seed = 1;
    std::string out;
    std::string dist = "normal";
    std::vector<double> zetas{0.0005, 0.0025};
    std::vector<double> taus{0.05};
    int threads = 0;
};

int cmd_quantiles(const QuantilesArgs& a) {
    std::vector<double> grid = default_prob_grid();
    double min_tail = 1.0;
    for (double z : a.zetas) {
        // zeta = 0.5 is the median request C(0.5)
        if (!(z > 0.0 && z <= 0.5)) throw ValidationError("zeta values must lie in (0, 0.5]");
        grid.push_back(z);
        grid.push_back(1.0 - z);
        min_tail = std::min(min_tail, z);
    }
    for (double t : a.taus) {
        if (!(t > 0.0 && t < 1.0)) throw ValidationError("tau values must lie in (0,1)");
        grid.push_back(0.5 * t);
        grid.push_back(1.0 - 0.5 * t);
        min_tail = std::min(min_tail, 0.5 * t);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (a.reps < static_cast<int64_t>(std::ceil(10.0 / min_tail * (1.0 - 1e-6))))
        throw InsufficientReps("reps=" + std::to_string(a.reps) + " cannot resolve tail " +
                               std::to_string(min_tail) + " (need >= 10/tail)");
    // default grid entries beyond what reps can resolve are dropped; the
    // requested levels were checked above
    grid = resolvable_prob_grid(std::move(grid), a.reps);

    const CppQuantiles q =
        estimate_quantiles(a.snr, error_dist_from_name(a.dist), a.reps, grid, a.seed, a.threads);
    for (double z : a.zetas) std::printf("C(zeta=%g) = %.6f\n", z, q.C(z));
    for (double t : a.taus)
        std::printf("tau=%g conservative (a,b) = (%.6f, %.6f)   exact d_av (a,b) = (%.6f, %.6f)\n", t,
                    q.quantile_dl(0.5 * t), q.quantile_du(1.0 - 0.5 * t), q.quantile_dav(0.5 * t),
                    q.quantile_dav(1.0 - 0.5 * t));
    if (!a.out.empty()) {
        write_text(a.out, q.to_json().dump(2) + "\n");
        std::printf("wrote %s\n", a.out.c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

struct PlanArgs {
    std::string config;
    std::string out;
    std::string cache_dir = ".adacp-cache";
    int64_t quantile_reps = 200000;
    uint64_t quantile_seed = 777;
    int threads = 0;
};

int cmd_plan(const PlanArgs& a) {
    const json cfg = load_json(a.config);
    check_keys(cfg, {"schema_version", "n", "plan", "delta"}, "plan config");
    check_schema_version(cfg);
    const int64_t n = cfg.at("n").get<int64_t>();
    StagePlan plan = StagePlan::from_json(cfg.at("plan"));
    if (cfg.contains("delta")) {
        const double psi = zeta_from_delta(plan.stages, cfg.at("delta").get<double>());
        plan.zeta.assign(plan.stages - 1, 0.5 * psi);
    }
    plan.validate(n);

    json out;
    out["schema_version"] = 1;
    out["n"] = n;
    bool needs_quantiles = false;
    for (double k : plan.K) needs_quantiles |= std::isnan(k);
    if (needs_quantiles) {
        if (std::isnan(plan.snr))
            throw ValidationError("deriving window constants needs plan.snr (plug-in SNR is run-time only)");
        SimulatingQuantileProvider provider(a.cache_dir, a.quantile_reps, a.quantile_seed, a.threads);
        StagePlan resolved = plan;
        for (int q = 2; q <= plan.stages; ++q)
            if (std::isnan(resolved.K[q - 2]))
                resolved.K[q - 2] = window_constant(q, resolved, provider.at_snr(plan.snr), n);
        plan = resolved;
    }
    out["plan"] = plan.to_json();
    json widths = json::array();
    for (int q = 2; q <= plan.stages; ++q) widths.push_back(2.0 * stage_halfwidth(q, plan, n));
    out["nominal_window_widths"] = widths;
    json counts = json::array();
    for (int64_t c : stage_counts(plan.lambda, n)) counts.push_back(c);
    out["stage_counts"] = counts;

    const std::string text = out.dump(2) + "\n";
    if (a.out.empty())
        std::cout << text;
    else
        write_text(a.out, text);
    return 0;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunArgs {
    std::string config;
    std::string oracle = "model";
    std::string out;
    std::string cache_dir = ".adacp-cache";
    uint64_t seed = 1;
    int threads = 0;
};

int cmd_run(const RunArgs& a) {
    const json cfg = load_json(a.config);
    check_keys(cfg,
               {"schema_version", "n", "basis", "plan", "model", "tau", "quantile_reps", "quantile_seed"},
               "run config");
    check_schema_version(cfg);
    const int64_t n = cfg.at("n").get<int64_t>();
    const BasisKind basis = basis_from_name(cfg.value("basis", "stump"));
    StagePlan plan = cfg.contains("plan") ? StagePlan::from_json(cfg.at("plan")) : StagePlan();
    const double tau = cfg.value("tau", 0.05);
    const int64_t quantile_reps = cfg.value("quantile_reps", static_cast<int64_t>(200000));
    const uint64_t quantile_seed = cfg.value("quantile_seed", static_cast<uint64_t>(777));
    plan.validate(n);

    const OracleSpec spec = parse_oracle_spec(a.oracle);
    std::unique_ptr<Oracle> oracle;
    double true_d0 = std::numeric_limits<double>::quiet_NaN();
    if (spec.kind == "model") {
        if (!cfg.contains("model")) throw ValidationError("model oracle needs a \"model\" config block");
        const ChangePointModel m = model_from_json(cfg.at("model"));
        true_d0 = m.d0;
        // simulation mode: the true SNR is known (noiseless models fall back
        // to the run-time plug-in, which is clamped)
        if (std::isnan(plan.snr) && std::isfinite(m.snr())) plan.snr = m.snr();
        oracle = std::make_unique<ModelOracle>(m, n);
    } else if (spec.kind == "pool") {
        oracle = std::make_unique<PoolOracle>(PoolOracle::from_csv(spec.arg, n));
    } else {
        oracle = std::make_unique<ExternalOracle>(spec.arg, n);
    }

    SimulatingQuantileProvider provider(a.cache_dir, quantile_reps, quantile_seed, a.threads);
    RngStream rng(a.seed);
    RunResult run = run_experiment(*oracle, plan, n, basis, rng, &provider, true_d0, /*keep_samples=*/true);

    // resolve the plan's window constants as the run used them
    StagePlan resolved = plan;
    for (size_t q = 0; q + 1 < run.stages.size(); ++q) resolved.K[q] = run.stages[q + 1].K_used;

    json out;
    out["schema_version"] = 1;
    out["seed"] = a.seed;
    out["n"] = n;
    out["basis"] = basis_name(basis);
    out["tau"] = tau;
    out["oracle"] = {{"kind", spec.kind},
                     {"budget_total", oracle->budget_total()},
                     {"budget_used", oracle->budget_used()}};
    out["plan"] = resolved.to_json();
    out["run"] = run.to_json(true);

    json cis = json::object();
    if (plan.stages >= 2) {
        const CppQuantiles& table = provider.at_snr(run.snr_used);
        const int P = plan.stages;
        const double C = limit_rate(P, resolved);
        const double gamma_eff = static_cast<double>(P - 2) + resolved.gamma[P - 2];
        const int64_t nP = run.final_stage().count;
        json cons = json::object(), exact = json::object();
        for (Center c : {Center::DLo, Center::DHi, Center::DAv}) {
            cons[center_name(c)] =
                conservative_ci(run.final_fit(), table, C, nP, gamma_eff, tau, c).to_json();
            exact[center_name(c)] = exact_ci(run.final_fit(), table, C, nP, gamma_eff, tau, c).to_json();
        }
        cis["conservative"] = cons;
        cis["exact"] = exact;
        try {
            cis["finite_sample"] = finite_sample_ci(run.final_fit(), resolved, n, table, tau).to_json();
        } catch (const PlanMismatch& e) {
            cis["finite_sample"] = {{"inapplicable", e.what()}};
        }
        cis["multistage"] =
            multistage_ci(P, resolved, table, n, run.final_fit().d_av, 0.5 * tau).to_json();
    }
    out["intervals"] = cis;

    const std::string text = out.dump(2) + "\n";
    if (a.out.empty())
        std::cout << text;
    else
        write_text(a.out, text);
    return 0;
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

struct McArgs {
    std::string preset;
    std::string config;
    std::string out = "mc";
    std::string cache_dir = ".adacp-cache";
    int64_t replicates = 0;  // 0 = preset default
    std::vector<int64_t> budgets;
    int64_t quantile_reps = 2000000;
    uint64_t quantile_seed = 777;
    uint64_t seed = 1;
    int threads = 0;
};

McPreset preset_from_config(const json& cfg, uint64_t seed, int threads) {
    check_keys(cfg,
               {"schema_version", "study", "label", "mode", "budgets", "snrs", "gammas", "Ks", "zeta1",
                "zeta", "tau", "replicates", "first_stage_design", "later_stage_design", "stages",
                "trim_per_tail", "lambda1_grid", "n", "snr", "gamma", "K", "lambda1", "fx_d0"},
               "mc config");
    check_schema_version(cfg);
    const std::string study = cfg.at("study").get<std::string>();
    McPreset p;
    p.name = cfg.value("label", study);
    if (study == "coverage") {
        CoverageConfig c;
        c.label = p.name;
        const std::string mode = cfg.value("mode", "calculus");
        if (mode == "fixed_k")
            c.mode = CoverageMode::FixedK;
        else if (mode == "calculus")
            c.mode = CoverageMode::Calculus;
        else
            throw ValidationError("coverage mode must be fixed_k or calculus");
        c.budgets = cfg.at("budgets").get<std::vector<int64_t>>();
        if (cfg.contains("snrs")) c.snrs = cfg.at("snrs").get<std::vector<double>>();
        if (cfg.contains("gammas")) c.gammas = cfg.at("gammas").get<std::vector<double>>();
        if (cfg.contains("Ks")) c.Ks = cfg.at("Ks").get<std::vector<double>>();
        if (cfg.contains("zeta1")) c.zeta1 = cfg.at("zeta1").get<double>();
        if (cfg.contains("tau")) c.tau = cfg.at("tau").get<double>();
        if (cfg.contains("replicates")) c.replicates = cfg.at("replicates").get<int64_t>();
        if (cfg.contains("first_stage_design")) c.first_stage = design_from_name(cfg.at("first_stage_design"));
        if (cfg.contains("later_stage_design")) c.later_stage = design_from_name(cfg.at("later_stage_design"));
        c.seed = seed;
        c.threads = threads;
        p.coverage.push_back(std::move(c));
    } else if (study == "are") {
        AreConfig c;
        c.label = p.name;
        if (cfg.contains("stages")) c.stages = cfg.at("stages").get<int>();
        c.budgets = cfg.at("budgets").get<std::vector<int64_t>>();
        if (cfg.contains("snrs")) c.snrs = cfg.at("snrs").get<std::vector<double>>();
        if (cfg.contains("zeta")) c.zeta = cfg.at("zeta").get<double>();
        if (cfg.contains("replicates")) c.replicates = cfg.at("replicates").get<int64_t>();
        if (cfg.contains("trim_per_tail")) c.trim_per_tail = cfg.at("trim_per_tail").get<int>();
        if (cfg.contains("fx_d0")) c.fx_d0 = cfg.at("fx_d0").get<double>();
        c.seed = seed;
        c.threads = threads;
        p.are.push_back(std::move(c));
    } else if (study == "allocation") {
        AllocationConfig c;
        c.label = p.name;
        if (cfg.contains("lambda1_grid")) c.lambda1_grid = cfg.at("lambda1_grid").get<std::vector<double>>();
        if (cfg.contains("n")) c.n = cfg.at("n").get<int64_t>();
        if (cfg.contains("snr")) c.snr = cfg.at("snr").get<double>();
        if (cfg.contains("zeta1")) c.zeta1 = cfg.at("zeta1").get<double>();
        if (cfg.contains("replicates")) c.replicates = cfg.at("replicates").get<int64_t>();
        if (cfg.contains("trim_per_tail")) c.trim_per_tail = cfg.at("trim_per_tail").get<int>();
        c.seed = seed;
        c.threads = threads;
        p.allocation.push_back(std::move(c));
    } else if (study == "rate") {
        RateConfig c;
        c.label = p.name;
        if (cfg.contains("budgets")) c.budgets = cfg.at("budgets").get<std::vector<int64_t>>();
        if (cfg.contains("snr")) c.snr = cfg.at("snr").get<double>();
        if (cfg.contains("gamma")) c.gamma = cfg.at("gamma").get<double>();
        if (cfg.contains("K")) c.K = cfg.at("K").get<double>();
        if (cfg.contains("lambda1")) c.lambda1 = cfg.at("lambda1").get<double>();
        if (cfg.contains("replicates")) c.replicates = cfg.at("replicates").get<int64_t>();
        c.seed = seed;
        c.threads = threads;
        p.rate.push_back(std::move(c));
    } else {
        throw ValidationError("unknown study '" + study + "'");
    }
    return p;
}

int cmd_mc(const McArgs& a) {
    if (a.preset.empty() == a.config.empty())
        throw ValidationError("mc needs exactly one of --preset or --config");
    McPreset preset = a.preset.empty() ? preset_from_config(load_json(a.config), a.seed, a.threads)
                                       : mc_preset(a.preset, a.seed, a.threads);
    for (auto& c : preset.coverage) {
        if (a.replicates > 0) c.replicates = a.replicates;
        if (!a.budgets.empty()) c.budgets = a.budgets;
    }
    for (auto& c : preset.are) {
        if (a.replicates > 0) c.replicates = a.replicates;
        if (!a.budgets.empty()) c.budgets = a.budgets;
    }
    for (auto& c : preset.allocation)
        if (a.replicates > 0) c.replicates = a.replicates;
    for (auto& c : preset.rate) {
        if (a.replicates > 0) c.replicates = a.replicates;
        if (!a.budgets.empty()) c.budgets = a.budgets;
    }
    if (!preset.coverage.empty() && preset.coverage.front().budgets.empty())
        throw ValidationError("mc coverage grid is empty");

    SimulatingQuantileProvider provider(a.cache_dir, a.quantile_reps, a.quantile_seed, a.threads);
    McReport report;
    for (const auto& c : preset.coverage) report.append(run_coverage_study(c, provider));
    for (const auto& c : preset.are) report.append(run_are_study(c, provider));
    for (const auto& c : preset.allocation) report.append(run_allocation_study(c, provider));
    for (const auto& c : preset.rate) report.append(run_rate_study(c));

    write_text(a.out + ".json", report.to_json().dump(2) + "\n");
    std::printf("wrote %s.json\n", a.out.c_str());
    if (!report.coverage.empty()) {
        write_text(a.out + "_coverage.csv", report.coverage_csv());
        std::printf("wrote %s_coverage.csv\n", a.out.c_str());
    }
    if (!report.are.empty()) {
        write_text(a.out + "_are.csv", report.are_csv());
        std::printf("wrote %s_are.csv\n", a.out.c_str());
    }
    if (!report.allocation.empty()) {
        write_text(a.out + "_allocation.csv", report.allocation_csv());
        std::printf("wrote %s_allocation.csv\n", a.out.c_str());
    }
    if (!report.rate.empty()) {
        write_text(a.out + "_rate.csv", report.rate_csv());
        std::printf("wrote %s_rate.csv\n", a.out.c_str());
    }
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Budget-constrained multistage adaptive sampling for change-point estimation"};
    app.require_subcommand(1);

    QuantilesArgs qa;
    CLI::App* q = app.add_subcommand("quantiles", "Simulate canonical argmin quantile tables");
    q->add_option("--snr", qa.snr, "signal-to-noise ratio of the canonical process");
    q->add_option("--reps", qa.reps, "number of simulated paths");
    q->add_option("--seed", qa.seed, "RNG seed");
    q->add_option("--out", qa.out, "cache file to write (JSON)");
    q->add_option("--error-dist", qa.dist, "error distribution (normal|uniform|laplace|none)");
    q->add_option("--zeta", qa.zetas, "zeta levels to report C(zeta) for")->delimiter(',');
    q->add_option("--tau", qa.taus, "tau levels to report (a,b) pairs for")->delimiter(',');
    q->add_option("--threads", qa.threads, "worker threads (0 = all cores)");

    PlanArgs pa;
    CLI::App* pl = app.add_subcommand("plan", "Derive a full stage plan from a budget and miss targets");
    pl->add_option("--config", pa.config, "plan config JSON")->required();
    pl->add_option("--out", pa.out, "output path (default: stdout)");
    pl->add_option("--cache-dir", pa.cache_dir, "quantile cache directory");
    pl->add_option("--quantile-reps", pa.quantile_reps, "paths per quantile table");
    pl->add_option("--quantile-seed", pa.quantile_seed, "seed for quantile tables");
    pl->add_option("--threads", pa.threads, "worker threads");

    RunArgs ra;
    CLI::App* r = app.add_subcommand("run", "Run one adaptive experiment against an oracle");
    r->add_option("--config", ra.config, "run config JSON")->required();
    r->add_option("--oracle", ra.oracle, "model | pool:PATH | exec:CMD");
    r->add_option("--seed", ra.seed, "RNG seed");
    r->add_option("--out", ra.out, "report path (default: stdout)");
    r->add_option("--cache-dir", ra.cache_dir, "quantile cache directory");
    r->add_option("--threads", ra.threads, "worker threads");

    McArgs ma;
    CLI::App* mc = app.add_subcommand("mc", "Replicated Monte Carlo studies");
    mc->add_option("--preset", ma.preset, "preset name (table1..table5, fig2, fig3, rate, allocation)");
    mc->add_option("--config", ma.config, "custom study config JSON");
    mc->add_option("--out", ma.out, "output prefix");
    mc->add_option("--cache-dir", ma.cache_dir, "quantile cache directory");
    mc->add_option("--replicates", ma.replicates, "override replicate count");
    mc->add_option("--budgets", ma.budgets, "override budget grid")->delimiter(',');
    mc->add_option("--quantile-reps", ma.quantile_reps, "paths per quantile table");
    mc->add_option("--quantile-seed", ma.quantile_seed, "seed for quantile tables");
    mc->add_option("--seed", ma.seed, "RNG seed");
    mc->add_option("--threads", ma.threads, "worker threads");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*q) return cmd_quantiles(qa);
        if (*pl) return cmd_plan(pa);
        if (*r) return cmd_run(ra);
        if (*mc) return cmd_mc(ma);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const OracleError& e) {
        std::cerr << "oracle error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace adacp

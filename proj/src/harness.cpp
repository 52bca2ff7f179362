#include "adacp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "adacp/parallel.hpp"

namespace adacp {

ChangePointModel reference_model(double snr, ErrorDist dist) {
    if (!(snr > 0.0)) throw ValidationError("reference model needs snr > 0");
    return make_stump_model(0.5, 1.5, 0.5, 1.0 / snr, dist);
}

double sample_sd(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double sample_mad(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += std::abs(x);
    return s / static_cast<double>(xs.size());
}

double sample_iqr(std::vector<double> xs) {
    if (xs.size() < 4) return 0.0;
    std::sort(xs.begin(), xs.end());
    auto q = [&](double p) {
        int64_t k = static_cast<int64_t>(std::ceil(p * static_cast<double>(xs.size()))) - 1;
        k = std::clamp<int64_t>(k, 0, static_cast<int64_t>(xs.size()) - 1);
        return xs[k];
    };
    return q(0.75) - q(0.25);
}

namespace {

constexpr double kD0 = 0.5;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

std::vector<double> trim_tails(std::vector<double> xs, int per_tail) {
    std::sort(xs.begin(), xs.end());
    if (per_tail > 0 && static_cast<size_t>(2 * per_tail) < xs.size())
        return std::vector<double>(xs.begin() + per_tail, xs.end() - per_tail);
    return xs;
}

StagePlan calculus_two_stage(double zeta1, double snr, DesignKind first, DesignKind later,
                             double lambda1 = 0.5, double gamma1 = 0.5) {
    StagePlan p;
    p.stages = 2;
    p.lambda = {lambda1, 1.0 - lambda1};
    p.gamma = {gamma1};
    p.zeta = {zeta1};
    p.K = {std::numeric_limits<double>::quiet_NaN()};
    p.snr = snr;
    p.first_stage = first;
    p.later_stage = later;
    return p;
}

StagePlan equal_pstage(int stages, double zeta, double snr, DesignKind first, DesignKind later) {
    StagePlan p;
    p.stages = stages;
    p.lambda.assign(stages, 1.0 / stages);
    p.zeta.assign(stages - 1, zeta);
    p.gamma.resize(stages - 1);
    for (int i = 0; i < stages - 1; ++i)
        p.gamma[i] = static_cast<double>(stages - i) / static_cast<double>(stages + 1);
    p.K.assign(stages - 1, std::numeric_limits<double>::quiet_NaN());
    p.snr = snr;
    p.first_stage = first;
    p.later_stage = later;
    return p;
}

}  // namespace

McReport run_coverage_study(const CoverageConfig& cfg, QuantileProvider& quantiles) {
    if (cfg.replicates < 100) throw ValidationError("coverage study needs at least 100 replicates");
    if (cfg.budgets.empty() || cfg.snrs.empty()) throw ValidationError("coverage study grid is empty");

    McReport report;
    RngStream root(cfg.seed);
    int64_t cell_index = 0;

    struct Combo {
        CiFamily family;
        Center center;
    };
    std::vector<Combo> combos;
    if (cfg.mode == CoverageMode::FixedK) {
        for (CiFamily f : {CiFamily::Conservative, CiFamily::Exact})
            for (Center c : {Center::DLo, Center::DHi, Center::DAv}) combos.push_back({f, c});
    } else {
        combos.push_back({CiFamily::FiniteSample, Center::DAv});
    }

    const std::vector<double> gammas = cfg.mode == CoverageMode::FixedK ? cfg.gammas
                                                                        : std::vector<double>{cfg.gammas.front()};
    const std::vector<double> Ks = cfg.mode == CoverageMode::FixedK ? cfg.Ks : std::vector<double>{0.0};

    for (double snr : cfg.snrs) {
        const CppQuantiles& table = quantiles.at_snr(snr);  // prefetch before parallel section
        const ChangePointModel model = reference_model(snr, cfg.noise);
        for (double gamma : gammas) {
            for (double K : Ks) {
                for (int64_t n : cfg.budgets) {
                    ++cell_index;
                    StagePlan plan;
                    if (cfg.mode == CoverageMode::FixedK) {
                        plan = StagePlan::fixed_k(K, gamma);
                        plan.zeta = {cfg.zeta1};
                        plan.snr = snr;
                        plan.first_stage = cfg.first_stage;
                        plan.later_stage = cfg.later_stage;
                    } else {
                        plan = calculus_two_stage(cfg.zeta1, snr, cfg.first_stage, cfg.later_stage,
                                                  0.5, gamma);
                    }

                    const int64_t N = cfg.replicates;
                    const size_t m = combos.size();
                    std::vector<uint8_t> covered(N * m, 0);
                    std::vector<double> lengths(N * m, 0.0);
                    std::vector<uint8_t> missed(N, 0);

                    parallel_for(N, cfg.threads, [&](int64_t rep) {
                        RngStream rng = root.split(cell_index, rep);
                        ModelOracle oracle(model, n);
                        RunResult run =
                            run_experiment(oracle, plan, n, BasisKind::Stump, rng, &quantiles, kD0);
                        const SplitFit& fit = run.final_fit();
                        const int64_t n2 = run.final_stage().count;
                        missed[rep] = run.window_missed[1] == 1;

                        if (cfg.mode == CoverageMode::FixedK) {
                            StagePlan resolved = plan;  // fixed K: already resolved
                            const double C = limit_rate(2, resolved);
                            for (size_t k = 0; k < m; ++k) {
                                const Combo& cb = combos[k];
                                const ConfidenceInterval ci =
                                    cb.family == CiFamily::Conservative
                                        ? conservative_ci(fit, table, C, n2, gamma, cfg.tau, cb.center)
                                        : exact_ci(fit, table, C, n2, gamma, cfg.tau, cb.center);
                                covered[rep * m + k] = ci.contains(kD0);
                                lengths[rep * m + k] = ci.length();
                            }
                        } else {
                            const ConfidenceInterval ci = finite_sample_ci(
                                fit.d_av, n, table.C(cfg.zeta1), table.C(0.5 * cfg.tau), cfg.tau);
                            covered[rep * m] = ci.contains(kD0);
                            lengths[rep * m] = ci.length();
                        }
                    });

                    double miss_rate = 0.0;
                    for (int64_t rep = 0; rep < N; ++rep) miss_rate += missed[rep];
                    miss_rate /= static_cast<double>(N);

                    for (size_t k = 0; k < m; ++k) {
                        if (!cfg.family_filter.empty() && cfg.family_filter != family_name(combos[k].family))
                            continue;
                        CoverageCell cell;
                        cell.study = cfg.label;
                        cell.n = n;
                        cell.snr = snr;
                        cell.gamma = gamma;
                        cell.K = cfg.mode == CoverageMode::FixedK ? K
                                                                  : std::numeric_limits<double>::quiet_NaN();
                        cell.lambda1 = plan.lambda[0];
                        cell.zeta1 = cfg.mode == CoverageMode::FixedK ? std::numeric_limits<double>::quiet_NaN()
                                                                      : cfg.zeta1;
                        cell.tau = cfg.tau;
                        cell.family = family_name(combos[k].family);
                        cell.center = center_name(combos[k].center);
                        cell.first_design = design_name(cfg.first_stage);
                        cell.later_design = design_name(cfg.later_stage);
                        cell.replicates = N;
                        double cov = 0.0, len = 0.0;
                        for (int64_t rep = 0; rep < N; ++rep) {
                            cov += covered[rep * m + k];
                            len += lengths[rep * m + k];
                        }
                        cell.coverage = cov / static_cast<double>(N);
                        cell.mean_length = len / static_cast<double>(N);
                        cell.miss_rate = miss_rate;
                        report.coverage.push_back(std::move(cell));
                    }
                }
            }
        }
    }
    return report;
}

McReport run_are_study(const AreConfig& cfg, QuantileProvider& quantiles) {
    if (cfg.budgets.empty() || cfg.snrs.empty()) throw ValidationError("ARE study grid is empty");
    if (cfg.replicates < 100) throw ValidationError("ARE study needs at least 100 replicates");
    if (cfg.trim_per_tail < 0 || cfg.trim_per_tail * 10 >= cfg.replicates)
        throw ValidationError("trim count must be below replicates/10");
    if (cfg.stages < 2) throw InvalidStageCount("ARE study compares multistage against one-stage");

    McReport report;
    RngStream root(cfg.seed);
    int64_t cell_index = 0;

    StagePlan one_stage;
    one_stage.stages = 1;
    one_stage.lambda = {1.0};

    for (double snr : cfg.snrs) {
        const CppQuantiles& table = quantiles.at_snr(snr);
        const ChangePointModel model = reference_model(snr, cfg.noise);
        double c_product = 1.0;
        for (int i = 0; i < cfg.stages - 1; ++i) c_product *= table.C(cfg.zeta);
        const double lambda_product = std::pow(1.0 / cfg.stages, cfg.stages);

        for (int64_t n : cfg.budgets) {
            ++cell_index;
            const StagePlan multi =
                equal_pstage(cfg.stages, cfg.zeta, snr, DesignKind::RandomUniform, DesignKind::RandomUniform);
            const int64_t N = cfg.replicates;
            std::vector<double> e1(N), e2(N);
            parallel_for(N, cfg.threads, [&](int64_t rep) {
                {
                    RngStream rng = root.split(cell_index, rep, 1);
                    ModelOracle oracle(model, n);
                    RunResult run = run_experiment(oracle, one_stage, n, BasisKind::Stump, rng, nullptr, kD0);
                    e1[rep] = run.final_fit().d_av - kD0;
                }
                {
                    RngStream rng = root.split(cell_index, rep, 2);
                    ModelOracle oracle(model, n);
                    RunResult run = run_experiment(oracle, multi, n, BasisKind::Stump, rng, &quantiles, kD0);
                    e2[rep] = run.final_fit().d_av - kD0;
                }
            });

            const std::vector<double> e2_trim = trim_tails(e2, cfg.trim_per_tail);
            const double theoretical = std::pow(static_cast<double>(n), cfg.stages - 1) * lambda_product /
                                       (std::pow(2.0, cfg.stages - 1) * c_product * cfg.fx_d0);

            struct MeasureDef {
                const char* name;
                double (*fn)(const std::vector<double>&);
            };
            auto iqr_fn = [](const std::vector<double>& xs) { return sample_iqr(xs); };
            const MeasureDef defs[] = {{"sd", &sample_sd}, {"mad", &sample_mad}, {"iqr", nullptr}};
            for (const auto& d : defs) {
                const double m1 = d.fn ? d.fn(e1) : iqr_fn(e1);
                for (bool trimmed : {true, false}) {
                    const std::vector<double>& arm = trimmed ? e2_trim : e2;
                    const double m2 = d.fn ? d.fn(arm) : iqr_fn(arm);
                    AreCell cell;
                    cell.study = cfg.label;
                    cell.n = n;
                    cell.snr = snr;
                    cell.measure = trimmed ? d.name : std::string(d.name) + "_untrimmed";
                    cell.empirical = m2 > 0 ? m1 / m2 : std::numeric_limits<double>::infinity();
                    cell.theoretical = theoretical;
                    cell.replicates_used = static_cast<int64_t>(arm.size());
                    report.are.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

McReport run_allocation_study(const AllocationConfig& cfg, QuantileProvider& quantiles) {
    if (cfg.lambda1_grid.empty()) throw ValidationError("allocation study grid is empty");
    if (cfg.replicates < 100) throw ValidationError("allocation study needs at least 100 replicates");
    if (cfg.trim_per_tail < 0 || cfg.trim_per_tail * 10 >= cfg.replicates)
        throw ValidationError("trim count must be below replicates/10");
    McReport report;
    RngStream root(cfg.seed);
    const CppQuantiles& table [[maybe_unused]] = quantiles.at_snr(cfg.snr);  // prefetch
    const ChangePointModel model = reference_model(cfg.snr, cfg.noise);

    for (double lambda1 : cfg.lambda1_grid) {
        AllocationCell cell;
        cell.study = cfg.label;
        cell.lambda1 = lambda1;
        cell.n = cfg.n;
        cell.snr = cfg.snr;
        const double l2 = 1.0 - lambda1;
        if (lambda1 * static_cast<double>(cfg.n) < 4.0 || l2 * static_cast<double>(cfg.n) < 4.0) {
            cell.underflow = true;  // StageUnderflow guard: recorded, cell skipped
            report.allocation.push_back(std::move(cell));
            continue;
        }
        const StagePlan plan = calculus_two_stage(cfg.zeta1, cfg.snr, DesignKind::RandomUniform,
                                                  DesignKind::RandomUniform, lambda1);
        const int64_t N = cfg.replicates;
        std::vector<double> errs(N);
        // common random numbers across the lambda grid: the same replicate
        // stream drives every cell, sharpening the dispersion comparison
        parallel_for(N, cfg.threads, [&](int64_t rep) {
            RngStream rng = root.split(rep);
            ModelOracle oracle(model, cfg.n);
            RunResult run = run_experiment(oracle, plan, cfg.n, BasisKind::Stump, rng, &quantiles, kD0);
            errs[rep] = run.final_fit().d_av - kD0;
        });
        const std::vector<double> trimmed = trim_tails(errs, cfg.trim_per_tail);
        cell.sd = sample_sd(trimmed);
        cell.sd_se = cell.sd / std::sqrt(2.0 * (static_cast<double>(trimmed.size()) - 1.0));
        cell.replicates_used = static_cast<int64_t>(trimmed.size());
        report.allocation.push_back(std::move(cell));
    }
    return report;
}

McReport run_rate_study(const RateConfig& cfg) {
    if (cfg.budgets.empty()) throw ValidationError("rate study grid is empty");
    McReport report;
    RngStream root(cfg.seed);
    const ChangePointModel model = reference_model(cfg.snr, cfg.noise);
    int64_t cell_index = 0;
    for (int64_t n : cfg.budgets) {
        ++cell_index;
        StagePlan plan = StagePlan::fixed_k(cfg.K, cfg.gamma, cfg.lambda1);
        plan.snr = cfg.snr;
        const int64_t N = cfg.replicates;
        std::vector<double> abs_err(N);
        parallel_for(N, cfg.threads, [&](int64_t rep) {
            RngStream rng = root.split(cell_index, rep);
            ModelOracle oracle(model, n);
            RunResult run = run_experiment(oracle, plan, n, BasisKind::Stump, rng, nullptr, kD0);
            abs_err[rep] = std::abs(run.final_fit().d_av - kD0);
        });
        std::sort(abs_err.begin(), abs_err.end());
        RateCell cell;
        cell.study = cfg.label;
        cell.n = n;
        cell.replicates = N;
        cell.median_abs_err = N % 2 == 1 ? abs_err[N / 2] : 0.5 * (abs_err[N / 2 - 1] + abs_err[N / 2]);
        report.rate.push_back(std::move(cell));
    }
    return report;
}

double loglog_slope(const std::vector<RateCell>& cells) {
    if (cells.size() < 2) throw ValidationError("slope needs at least two budgets");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(cells.size());
    for (const RateCell& c : cells) {
        const double x = std::log(static_cast<double>(c.n));
        const double y = std::log(c.median_abs_err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

void McReport::append(const McReport& other) {
    coverage.insert(coverage.end(), other.coverage.begin(), other.coverage.end());
    are.insert(are.end(), other.are.begin(), other.are.end());
    allocation.insert(allocation.end(), other.allocation.begin(), other.allocation.end());
    rate.insert(rate.end(), other.rate.begin(), other.rate.end());
}

nlohmann::json McReport::to_json() const {
    nlohmann::json j;
    j["coverage"] = nlohmann::json::array();
    for (const auto& c : coverage)
        j["coverage"].push_back({{"study", c.study},
                                 {"n", c.n},
                                 {"snr", c.snr},
                                 {"gamma", c.gamma},
                                 {"K", std::isnan(c.K) ? nlohmann::json() : nlohmann::json(c.K)},
                                 {"lambda1", c.lambda1},
                                 {"zeta1", std::isnan(c.zeta1) ? nlohmann::json() : nlohmann::json(c.zeta1)},
                                 {"tau", c.tau},
                                 {"family", c.family},
                                 {"center", c.center},
                                 {"first_design", c.first_design},
                                 {"later_design", c.later_design},
                                 {"replicates", c.replicates},
                                 {"coverage", c.coverage},
                                 {"mean_length", c.mean_length},
                                 {"miss_rate", c.miss_rate}});
    j["are"] = nlohmann::json::array();
    for (const auto& c : are)
        j["are"].push_back({{"study", c.study},
                            {"n", c.n},
                            {"snr", c.snr},
                            {"measure", c.measure},
                            {"empirical", c.empirical},
                            {"theoretical", c.theoretical},
                            {"replicates_used", c.replicates_used}});
    j["allocation"] = nlohmann::json::array();
    for (const auto& c : allocation)
        j["allocation"].push_back({{"study", c.study},
                                   {"lambda1", c.lambda1},
                                   {"n", c.n},
                                   {"snr", c.snr},
                                   {"underflow", c.underflow},
                                   {"sd", c.sd},
                                   {"sd_se", c.sd_se},
                                   {"replicates_used", c.replicates_used}});
    j["rate"] = nlohmann::json::array();
    for (const auto& c : rate)
        j["rate"].push_back({{"study", c.study},
                             {"n", c.n},
                             {"median_abs_err", c.median_abs_err},
                             {"replicates", c.replicates}});
    return j;
}

McReport McReport::from_json(const nlohmann::json& j) {
    McReport r;
    for (const auto& c : j.value("coverage", nlohmann::json::array())) {
        CoverageCell cell;
        cell.study = c.at("study");
        cell.n = c.at("n");
        cell.snr = c.at("snr");
        cell.gamma = c.at("gamma");
        cell.K = c.at("K").is_null() ? std::numeric_limits<double>::quiet_NaN() : c.at("K").get<double>();
        cell.lambda1 = c.at("lambda1");
        cell.zeta1 =
            c.at("zeta1").is_null() ? std::numeric_limits<double>::quiet_NaN() : c.at("zeta1").get<double>();
        cell.tau = c.at("tau");
        cell.family = c.at("family");
        cell.center = c.at("center");
        cell.first_design = c.at("first_design");
        cell.later_design = c.at("later_design");
        cell.replicates = c.at("replicates");
        cell.coverage = c.at("coverage");
        cell.mean_length = c.at("mean_length");
        cell.miss_rate = c.at("miss_rate");
        r.coverage.push_back(std::move(cell));
    }
    for (const auto& c : j.value("are", nlohmann::json::array())) {
        AreCell cell;
        cell.study = c.at("study");
        cell.n = c.at("n");
        cell.snr = c.at("snr");
        cell.measure = c.at("measure");
        cell.empirical = c.at("empirical");
        cell.theoretical = c.at("theoretical");
        cell.replicates_used = c.at("replicates_used");
        r.are.push_back(std::move(cell));
    }
    for (const auto& c : j.value("allocation", nlohmann::json::array())) {
        AllocationCell cell;
        cell.study = c.at("study");
        cell.lambda1 = c.at("lambda1");
        cell.n = c.at("n");
        cell.snr = c.at("snr");
        cell.underflow = c.at("underflow");
        cell.sd = c.at("sd");
        cell.sd_se = c.at("sd_se");
        cell.replicates_used = c.at("replicates_used");
        r.allocation.push_back(std::move(cell));
    }
    for (const auto& c : j.value("rate", nlohmann::json::array())) {
        RateCell cell;
        cell.study = c.at("study");
        cell.n = c.at("n");
        cell.median_abs_err = c.at("median_abs_err");
        cell.replicates = c.at("replicates");
        r.rate.push_back(std::move(cell));
    }
    return r;
}

std::string McReport::coverage_csv() const {
    std::ostringstream out;
    out << "study,n,snr,gamma,K,lambda1,zeta1,tau,family,center,first_design,later_design,"
           "replicates,coverage,mean_length,miss_rate\n";
    for (const auto& c : coverage) {
        out << c.study << ',' << c.n << ',' << fmt(c.snr) << ',' << fmt(c.gamma) << ','
            << (std::isnan(c.K) ? "" : fmt(c.K)) << ',' << fmt(c.lambda1) << ','
            << (std::isnan(c.zeta1) ? "" : fmt(c.zeta1)) << ',' << fmt(c.tau) << ',' << c.family << ','
            << c.center << ',' << c.first_design << ',' << c.later_design << ',' << c.replicates << ','
            << fmt(c.coverage) << ',' << fmt(c.mean_length) << ',' << fmt(c.miss_rate) << '\n';
    }
    return out.str();
}

std::string McReport::are_csv() const {
    std::ostringstream out;
    out << "study,snr,n,measure,empirical,theoretical,replicates_used\n";
    for (const auto& c : are)
        out << c.study << ',' << fmt(c.snr) << ',' << c.n << ',' << c.measure << ',' << fmt(c.empirical)
            << ',' << fmt(c.theoretical) << ',' << c.replicates_used << '\n';
    return out.str();
}

std::string McReport::allocation_csv() const {
    std::ostringstream out;
    out << "study,n,snr,lambda1,underflow,sd,sd_se,replicates_used\n";
    for (const auto& c : allocation)
        out << c.study << ',' << c.n << ',' << fmt(c.snr) << ',' << fmt(c.lambda1) << ','
            << (c.underflow ? 1 : 0) << ',' << fmt(c.sd) << ',' << fmt(c.sd_se) << ','
            << c.replicates_used << '\n';
    return out.str();
}

std::string McReport::rate_csv() const {
    std::ostringstream out;
    out << "study,n,median_abs_err,replicates\n";
    for (const auto& c : rate)
        out << c.study << ',' << c.n << ',' << fmt(c.median_abs_err) << ',' << c.replicates << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

std::vector<std::string> mc_preset_names() {
    return {"table1", "table2", "table3", "table4", "table5", "fig2", "fig3", "rate", "allocation"};
}

McPreset mc_preset(const std::string& name, uint64_t seed, int threads) {
    McPreset p;
    p.name = name;
    const std::vector<int64_t> table12_budgets{50, 100, 200, 500, 1000};
    const std::vector<int64_t> table3_budgets{50, 100, 200, 500};
    std::vector<int64_t> fig_budgets;
    for (int64_t n = 50; n <= 1500; n += 50) fig_budgets.push_back(n);

    if (name == "table1" || name == "table2") {
        CoverageConfig c;
        c.label = name;
        c.mode = CoverageMode::FixedK;
        c.budgets = table12_budgets;
        c.snrs = {5.0};
        c.gammas = {0.5, 2.0 / 3.0};
        c.Ks = {1.0, 2.0};
        c.family_filter = name == "table1" ? "conservative" : "exact";
        c.replicates = 2000;
        c.seed = seed;
        c.threads = threads;
        p.coverage.push_back(c);
    } else if (name == "table3" || name == "table4" || name == "table5") {
        CoverageConfig c;
        c.label = name;
        c.mode = CoverageMode::Calculus;
        c.budgets = table3_budgets;
        c.snrs = {2.0, 5.0, 8.0};
        c.zeta1 = 0.0005;
        c.replicates = 5000;
        c.seed = seed;
        c.threads = threads;
        if (name == "table4") c.first_stage = DesignKind::Equispaced;
        if (name == "table5") {
            c.first_stage = DesignKind::Equispaced;
            c.later_stage = DesignKind::Equispaced;
        }
        p.coverage.push_back(c);
    } else if (name == "fig2") {
        AreConfig a;
        a.label = name;
        a.stages = 2;
        a.budgets = fig_budgets;
        a.snrs = {1.0, 2.0, 5.0, 8.0};
        a.zeta = 0.0025;
        a.replicates = 5000;
        a.trim_per_tail = 5;
        a.seed = seed;
        a.threads = threads;
        p.are.push_back(a);
    } else if (name == "fig3") {
        AreConfig a;
        a.label = name;
        a.stages = 3;
        a.budgets = fig_budgets;
        a.snrs = {5.0, 8.0};
        a.zeta = 0.0025;
        a.replicates = 5000;
        a.trim_per_tail = 3;
        a.seed = seed;
        a.threads = threads;
        p.are.push_back(a);
    } else if (name == "rate") {
        RateConfig r;
        r.label = name;
        r.seed = seed;
        r.threads = threads;
        p.rate.push_back(r);
    } else if (name == "allocation") {
        AllocationConfig a;
        a.label = name;
        a.seed = seed;
        a.threads = threads;
        p.allocation.push_back(a);
    } else {
        throw ValidationError("unknown mc preset '" + name + "'");
    }
    return p;
}

}  // namespace adacp

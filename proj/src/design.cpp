#include "adacp/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adacp/json_util.hpp"

namespace adacp {

const char* design_name(DesignKind d) {
    switch (d) {
        case DesignKind::RandomUniform: return "random";
        case DesignKind::Equispaced: return "equispaced";
        case DesignKind::Density: return "density";
    }
    return "?";
}

DesignKind design_from_name(const std::string& name) {
    if (name == "random") return DesignKind::RandomUniform;
    if (name == "equispaced") return DesignKind::Equispaced;
    if (name == "density") return DesignKind::Density;
    throw ValidationError("unknown design '" + name + "' (expected random|equispaced|density)");
}

double zeta_from_delta(int stages, double delta) {
    if (stages < 2) throw InvalidStageCount("zeta_from_delta needs at least 2 stages");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
    return 1.0 - std::pow(1.0 - delta, 1.0 / static_cast<double>(stages - 1));
}

std::vector<int64_t> stage_counts(const std::vector<double>& lambda, int64_t n) {
    const size_t p = lambda.size();
    std::vector<int64_t> counts(p);
    std::vector<std::pair<double, size_t>> fracs(p);
    int64_t assigned = 0;
    for (size_t q = 0; q < p; ++q) {
        const double exact = lambda[q] * static_cast<double>(n);
        counts[q] = static_cast<int64_t>(std::floor(exact));
        fracs[q] = {exact - std::floor(exact), q};
        assigned += counts[q];
    }
    // largest remainder first; ties to earlier stages
    std::sort(fracs.begin(), fracs.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int64_t r = n - assigned, i = 0; r > 0; --r, ++i) counts[fracs[i].second] += 1;
    return counts;
}

double StagePlan::h0() const {
    if (later_stage == DesignKind::Density) {
        if (!h) throw ValidationError("later-stage density design needs an h spec");
        return h->value_at_zero();
    }
    return 0.5;  // uniform density on [-1,1]
}

void StagePlan::validate(int64_t n) const {
    if (stages < 1) throw InvalidStageCount("plan needs at least 1 stage");
    if (static_cast<int>(lambda.size()) != stages) throw ValidationError("lambda must have one entry per stage");
    double sum = 0.0;
    for (double l : lambda) {
        if (!(l > 0.0)) throw ValidationError("stage fractions must be positive");
        sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("stage fractions must sum to 1");
    if (n > 0)
        for (double l : lambda)
            if (l * static_cast<double>(n) < 1.0) throw ValidationError("each lambda_q * n must be >= 1");
    const size_t zoom = static_cast<size_t>(stages - 1);
    if (gamma.size() != zoom || zeta.size() != zoom || K.size() != zoom)
        throw ValidationError("gamma/zeta/K must have one entry per zoom-in stage");
    for (size_t i = 0; i < zoom; ++i) {
        if (!(gamma[i] > 0.0 && gamma[i] < 1.0)) throw ValidationError("gamma entries must lie in (0,1)");
        if (i > 0 && !(gamma[i] < gamma[i - 1])) throw ValidationError("gamma must be strictly decreasing");
        if (!(zeta[i] > 0.0 && zeta[i] < 0.5)) throw ValidationError("zeta entries must lie in (0,0.5)");
        if (!std::isnan(K[i]) && !(K[i] > 0.0)) throw ValidationError("window constants must be positive");
    }
    if (first_stage == DesignKind::Density)
        throw ValidationError("stage one samples the full support; density designs apply to later stages");
    if (later_stage == DesignKind::Density && !h)
        throw ValidationError("later-stage density design needs an h spec");
    if (!(eps0 >= 0.0 && eps0 < 0.5)) throw ValidationError("eps0 must lie in [0, 0.5)");
}

StagePlan StagePlan::calculus(int stages, double delta, double snr) {
    if (stages < 2) throw InvalidStageCount("calculus plan needs at least 2 stages");
    StagePlan p;
    p.stages = stages;
    p.lambda.assign(stages, 1.0 / stages);
    const double psi = zeta_from_delta(stages, delta);
    p.zeta.assign(stages - 1, 0.5 * psi);
    p.gamma.resize(stages - 1);
    for (int i = 0; i < stages - 1; ++i)
        p.gamma[i] = static_cast<double>(stages - i) / static_cast<double>(stages + 1);
    p.K.assign(stages - 1, std::numeric_limits<double>::quiet_NaN());
    p.snr = snr;
    return p;
}

StagePlan StagePlan::fixed_k(double Kval, double gamma1, double lambda1) {
    if (lambda1 <= 0.0) lambda1 = gamma1 / (1.0 + gamma1);
    StagePlan p;
    p.stages = 2;
    p.lambda = {lambda1, 1.0 - lambda1};
    p.gamma = {gamma1};
    p.zeta = {0.0005};
    p.K = {Kval};
    return p;
}

double window_constant(int q, const StagePlan& plan, const CppQuantiles& quantiles, int64_t n) {
    if (q < 2 || q > plan.stages) throw ValidationError("window_constant: stage out of range");
    const double gq = plan.gamma[q - 2];
    double num = std::pow(2.0, q - 2);
    for (int i = 0; i <= q - 2; ++i) num *= quantiles.C(plan.zeta[i]);
    double den = std::pow(static_cast<double>(n), 1.0 - gq);
    for (int i = 0; i <= q - 3; ++i) den *= plan.lambda[i];
    den *= std::pow(plan.lambda[q - 2], -gq - static_cast<double>(q) + 3.0);
    return num / den;
}

double stage_halfwidth(int q, const StagePlan& plan, int64_t n) {
    if (q < 2 || q > plan.stages) throw ValidationError("stage_halfwidth: stage out of range");
    const double Kq = plan.K[q - 2];
    if (std::isnan(Kq)) throw MissingQuantiles("window constant K_" + std::to_string(q - 1) + " is unresolved");
    const double nq1 = plan.lambda[q - 2] * static_cast<double>(n);
    const double expo = static_cast<double>(q - 2) + plan.gamma[q - 2];
    return Kq * std::pow(nq1, -expo);
}

Window stage_window(double prev_center, int q, const StagePlan& plan, int64_t n, double* preclip_width) {
    const double hw = stage_halfwidth(q, plan, n);
    if (preclip_width) *preclip_width = 2.0 * hw;
    return clip_window(prev_center - hw, prev_center + hw);
}

double limit_rate(int q, const StagePlan& plan) {
    if (q < 2 || q > plan.stages) throw ValidationError("limit_rate: stage out of range");
    const double Kq = plan.K[q - 2];
    if (std::isnan(Kq)) throw MissingQuantiles("window constant K_" + std::to_string(q - 1) + " is unresolved");
    const double expo = static_cast<double>(q - 2) + plan.gamma[q - 2];
    const double base = std::pow(plan.lambda[q - 2] / plan.lambda[q - 1], expo) / (2.0 * Kq);
    return base * 2.0 * plan.h0();  // uniform density has h(0) = 1/2 => factor 1
}

nlohmann::json StagePlan::to_json() const {
    nlohmann::json j;
    j["stages"] = stages;
    j["lambda"] = lambda;
    j["gamma"] = gamma;
    j["zeta"] = zeta;
    nlohmann::json karr = nlohmann::json::array();
    for (double k : K) {
        if (std::isnan(k))
            karr.push_back(nullptr);
        else
            karr.push_back(k);
    }
    j["K"] = karr;
    j["first_stage_design"] = design_name(first_stage);
    j["later_stage_design"] = design_name(later_stage);
    if (h) j["h"] = h->name();
    if (!std::isnan(snr)) j["snr"] = snr;
    j["eps0"] = eps0;
    j["center"] = center == CenterRule::DAv ? "d_av" : "d_lo";
    j["reestimate_stump_params"] = reestimate_stump_params;
    return j;
}

StagePlan StagePlan::from_json(const nlohmann::json& j) {
    check_keys(j,
               {"stages", "lambda", "gamma", "zeta", "K", "first_stage_design", "later_stage_design", "h",
                "snr", "eps0", "center", "reestimate_stump_params"},
               "plan");
    StagePlan p;
    p.stages = j.at("stages").get<int>();
    if (j.contains("lambda"))
        p.lambda = j.at("lambda").get<std::vector<double>>();
    else
        p.lambda.assign(p.stages, 1.0 / p.stages);
    const size_t zoom = p.stages >= 1 ? static_cast<size_t>(p.stages - 1) : 0;
    if (j.contains("gamma")) {
        p.gamma = j.at("gamma").get<std::vector<double>>();
    } else {
        p.gamma.resize(zoom);  // strictly decreasing default
        for (size_t i = 0; i < zoom; ++i)
            p.gamma[i] = static_cast<double>(p.stages - static_cast<int>(i)) / static_cast<double>(p.stages + 1);
    }
    p.zeta = j.contains("zeta") ? j.at("zeta").get<std::vector<double>>() : std::vector<double>(zoom, 0.0005);
    if (j.contains("K") && !j.at("K").is_null()) {
        p.K.clear();
        for (const auto& k : j.at("K"))
            p.K.push_back(k.is_null() ? std::numeric_limits<double>::quiet_NaN() : k.get<double>());
    } else {
        p.K.assign(zoom, std::numeric_limits<double>::quiet_NaN());
    }
    if (j.contains("first_stage_design")) p.first_stage = design_from_name(j.at("first_stage_design"));
    if (j.contains("later_stage_design")) p.later_stage = design_from_name(j.at("later_stage_design"));
    if (j.contains("h")) {
        const std::string name = j.at("h").get<std::string>();
        if (name == "uniform")
            p.h = SymmetricDensity::uniform();
        else if (name == "triangular")
            p.h = SymmetricDensity::triangular();
        else
            throw ValidationError("unknown h density '" + name + "'");
    }
    if (j.contains("snr") && !j.at("snr").is_null()) p.snr = j.at("snr").get<double>();
    if (j.contains("eps0")) p.eps0 = j.at("eps0").get<double>();
    if (j.contains("center")) {
        const std::string c = j.at("center").get<std::string>();
        if (c == "d_av")
            p.center = CenterRule::DAv;
        else if (c == "d_lo")
            p.center = CenterRule::DLo;
        else
            throw ValidationError("unknown center rule '" + c + "'");
    }
    if (j.contains("reestimate_stump_params")) p.reestimate_stump_params = j.at("reestimate_stump_params").get<bool>();
    return p;
}

namespace {

nlohmann::json fit_to_json(const SplitFit& f) {
    return nlohmann::json{{"d_lo", f.d_lo},       {"d_hi", f.d_hi}, {"d_av", f.d_av},
                          {"beta_l", f.beta_l},   {"beta_u", f.beta_u},
                          {"rss", f.rss},         {"sigma_hat", f.sigma_hat}};
}

}  // namespace

nlohmann::json RunResult::to_json(bool include_samples) const {
    nlohmann::json stages_j = nlohmann::json::array();
    for (size_t q = 0; q < stages.size(); ++q) {
        const StageRecord& r = stages[q];
        nlohmann::json sj{{"stage", q + 1},
                          {"window", {{"lo", r.window.lo}, {"hi", r.window.hi}}},
                          {"preclip_width", r.preclip_width},
                          {"count", r.count},
                          {"fit", fit_to_json(r.fit)}};
        if (!std::isnan(r.K_used)) sj["K"] = r.K_used;
        if (q < window_missed.size() && window_missed[q] >= 0) sj["window_missed"] = window_missed[q] == 1;
        if (include_samples && !r.samples.empty()) {
            nlohmann::json xs = nlohmann::json::array(), ys = nlohmann::json::array();
            for (const Sample& s : r.samples) {
                xs.push_back(s.x);
                ys.push_back(s.y);
            }
            sj["x"] = xs;
            sj["y"] = ys;
        }
        stages_j.push_back(std::move(sj));
    }
    return nlohmann::json{{"stages", stages_j},
                          {"budget_used", budget_used},
                          {"sigma_hat_stage1", sigma_hat_stage1},
                          {"snr_used", snr_used},
                          {"estimate", fit_to_json(final_fit())}};
}

RunResult run_experiment(Oracle& oracle, const StagePlan& plan, int64_t n, BasisKind basis,
                         RngStream& rng, QuantileProvider* quantiles, double true_d0, bool keep_samples) {
    plan.validate(n);
    if (oracle.budget_left() < n)
        throw BudgetExhausted("oracle budget " + std::to_string(oracle.budget_left()) +
                              " is below the planned n=" + std::to_string(n));
    const std::vector<int64_t> counts = stage_counts(plan.lambda, n);
    for (int64_t c : counts)
        if (c < 2) throw StageUnderflow("a stage was allocated fewer than 2 samples");

    StagePlan resolved = plan;  // K entries get filled as stages are reached
    RunResult out;
    const bool know_truth = std::isfinite(true_d0);
    std::vector<Sample> pooled;  // for the stump re-estimation mode

    // ---- stage 1
    {
        const Window support{0.0, 1.0};
        RngStream draw_rng = rng.split(1, 0);
        RngStream noise_rng = rng.split(1, 1);
        std::vector<double> xs = plan.first_stage == DesignKind::Equispaced
                                     ? equispaced_covariates(support, counts[0])
                                     : draw_uniform_covariates(support, counts[0], draw_rng);
        std::vector<Sample> samples = oracle.query_batch(xs, noise_rng);

        StageRecord rec;
        rec.window = Window{plan.eps0, 1.0 - plan.eps0};
        rec.preclip_width = rec.window.width();
        rec.count = counts[0];
        rec.fit = fit_free(samples, rec.window, basis);
        if (plan.reestimate_stump_params || keep_samples) pooled = samples;
        if (keep_samples) rec.samples = std::move(samples);
        out.sigma_hat_stage1 = rec.fit.sigma_hat;
        out.stages.push_back(std::move(rec));
        out.window_missed.push_back(know_truth ? 0 : -1);  // stage 1 spans the support
    }

    const SplitFit first = out.stages[0].fit;  // by value: out.stages grows below
    if (std::isfinite(plan.snr)) {
        out.snr_used = plan.snr;
    } else {
        const double center0 = plan.center == CenterRule::DAv ? first.d_av : first.d_lo;
        const double gap = basis_eval(basis, first.beta_u, center0) - basis_eval(basis, first.beta_l, center0);
        const double est = out.sigma_hat_stage1 > 0 ? std::abs(gap) / out.sigma_hat_stage1
                                                    : std::numeric_limits<double>::infinity();
        // canonical tables degenerate outside this range (at snr >= 50 the
        // argmin law is the zero-noise closed form to within MC noise)
        out.snr_used = std::clamp(est, 0.1, 50.0);
    }

    // ---- stages 2..P
    for (int q = 2; q <= plan.stages; ++q) {
        if (std::isnan(resolved.K[q - 2])) {
            if (!quantiles)
                throw MissingQuantiles("stage " + std::to_string(q) +
                                       " needs a derived window constant but no quantile provider was given");
            resolved.K[q - 2] = window_constant(q, resolved, quantiles->at_snr(out.snr_used), n);
        }
        const SplitFit& prev = out.stages[q - 2].fit;
        const double center = plan.center == CenterRule::DAv ? prev.d_av : prev.d_lo;
        double preclip = 0.0;
        const Window w = stage_window(center, q, resolved, n, &preclip);
        if (know_truth) out.window_missed.push_back(true_d0 >= w.lo && true_d0 <= w.hi ? 0 : 1);
        else out.window_missed.push_back(-1);

        RngStream draw_rng = rng.split(static_cast<uint64_t>(q), 0);
        RngStream noise_rng = rng.split(static_cast<uint64_t>(q), 1);
        std::vector<double> xs;
        switch (plan.later_stage) {
            case DesignKind::RandomUniform: xs = draw_uniform_covariates(w, counts[q - 1], draw_rng); break;
            case DesignKind::Equispaced: xs = equispaced_covariates(w, counts[q - 1]); break;
            case DesignKind::Density: xs = draw_density_covariates(w, counts[q - 1], *plan.h, draw_rng); break;
        }
        std::vector<Sample> samples = oracle.query_batch(xs, noise_rng);

        std::vector<double> bl = first.beta_l, bu = first.beta_u;
        if (plan.reestimate_stump_params && basis == BasisKind::Stump) {
            pooled.insert(pooled.end(), samples.begin(), samples.end());
            double sl = 0, su = 0;
            int64_t cl = 0, cu = 0;
            for (const Sample& s : pooled) {
                if (s.x <= center) sl += s.y, ++cl;
                else su += s.y, ++cu;
            }
            if (cl > 0 && cu > 0) {
                bl = {sl / cl};
                bu = {su / cu};
            }
        }

        StageRecord rec;
        rec.window = w;
        rec.preclip_width = preclip;
        rec.count = counts[q - 1];
        rec.K_used = resolved.K[q - 2];
        rec.fit = fit_fixed(samples, w, bl, bu, basis);
        rec.fit.sigma_hat = out.sigma_hat_stage1;  // pooled stage-1 estimate is reused downstream
        if (keep_samples) rec.samples = std::move(samples);
        out.stages.push_back(std::move(rec));
    }

    out.budget_used = 0;
    for (int64_t c : counts) out.budget_used += c;
    return out;
}

}  // namespace adacp

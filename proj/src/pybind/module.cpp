#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adacp/harness.hpp"

namespace py = pybind11;
using namespace adacp;

namespace {

std::vector<Sample> zip_samples(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("x and y must have the same length");
    std::vector<Sample> s(x.size());
    for (size_t i = 0; i < x.size(); ++i) s[i] = {x[i], y[i]};
    return s;
}

py::dict fit_to_dict(const SplitFit& f) {
    py::dict d;
    d["d_lo"] = f.d_lo;
    d["d_hi"] = f.d_hi;
    d["d_av"] = f.d_av;
    d["beta_l"] = f.beta_l;
    d["beta_u"] = f.beta_u;
    d["rss"] = f.rss;
    d["sigma_hat"] = f.sigma_hat;
    return d;
}

py::dict ci_to_dict(const ConfidenceInterval& ci) {
    py::dict d;
    d["lo"] = ci.lo;
    d["hi"] = ci.hi;
    d["nominal_level"] = ci.nominal_level;
    d["family"] = family_name(ci.family);
    d["center"] = center_name(ci.center);
    return d;
}

ChangePointModel build_model(const std::string& basis, const std::vector<double>& beta_l,
                             const std::vector<double>& beta_u, double d0, double sigma,
                             const std::string& dist) {
    ChangePointModel m;
    m.basis = basis_from_name(basis);
    m.beta_l = beta_l;
    m.beta_u = beta_u;
    m.d0 = d0;
    m.noise.sigma = sigma;
    m.noise.dist = error_dist_from_name(dist);
    m.validate();
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multistage adaptive sampling for change-point estimation (C++ core)";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<OracleError>(m, "OracleError", PyExc_RuntimeError);

    py::class_<ChangePointModel>(m, "ChangePointModel")
        .def(py::init(&build_model), py::arg("basis"), py::arg("beta_l"), py::arg("beta_u"),
             py::arg("d0"), py::arg("sigma") = 0.0, py::arg("dist") = "normal")
        .def_readonly("d0", &ChangePointModel::d0)
        .def("mu", &ChangePointModel::mu, py::arg("x"))
        .def("jump_gap", &ChangePointModel::jump_gap)
        .def("snr", &ChangePointModel::snr);

    m.def("evaluate_mu", [](const ChangePointModel& model, double x) { return model.mu(x); },
          py::arg("model"), py::arg("x"));

    m.def(
        "fit_free",
        [](const std::vector<double>& x, const std::vector<double>& y, double lo, double hi,
           const std::string& basis) {
            return fit_to_dict(fit_free(zip_samples(x, y), Window{lo, hi}, basis_from_name(basis)));
        },
        py::arg("x"), py::arg("y"), py::arg("lo") = 0.0, py::arg("hi") = 1.0,
        py::arg("basis") = "stump");

    m.def(
        "fit_fixed",
        [](const std::vector<double>& x, const std::vector<double>& y, double lo, double hi,
           const std::vector<double>& beta_l, const std::vector<double>& beta_u,
           const std::string& basis) {
            return fit_to_dict(
                fit_fixed(zip_samples(x, y), Window{lo, hi}, beta_l, beta_u, basis_from_name(basis)));
        },
        py::arg("x"), py::arg("y"), py::arg("lo"), py::arg("hi"), py::arg("beta_l"), py::arg("beta_u"),
        py::arg("basis") = "stump");

    m.def(
        "simulate_argmin",
        [](double jump, double rho, double rate, const std::string& dist, int64_t paths, uint64_t seed) {
            CppParams p;
            p.jump = jump;
            p.rho = rho;
            p.rate = rate;
            p.eta = error_dist_from_name(dist);
            RngStream root(seed);
            std::vector<double> dl(paths), du(paths);
            for (int64_t i = 0; i < paths; ++i) {
                RngStream rng = root.split(0x71u, static_cast<uint64_t>(i));
                const ArgminPair a = simulate_path_argmin(p, rng);
                dl[i] = a.d_l;
                du[i] = a.d_u;
            }
            return py::make_tuple(dl, du);
        },
        py::arg("jump"), py::arg("rho") = 1.0, py::arg("rate") = 1.0, py::arg("dist") = "normal",
        py::arg("paths") = 1000, py::arg("seed") = 1);

    py::class_<CppQuantiles>(m, "CppQuantiles")
        .def_readonly("snr", &CppQuantiles::snr)
        .def_readonly("reps", &CppQuantiles::reps)
        .def_readonly("prob_grid", &CppQuantiles::prob_grid)
        .def("C", &CppQuantiles::C, py::arg("zeta"))
        .def("quantile_dl", &CppQuantiles::quantile_dl, py::arg("p"))
        .def("quantile_du", &CppQuantiles::quantile_du, py::arg("p"))
        .def("quantile_dav", &CppQuantiles::quantile_dav, py::arg("p"));

    m.def(
        "estimate_quantiles",
        [](double snr, int64_t reps, uint64_t seed, const std::string& dist, int threads,
           const std::vector<double>& prob_grid) {
            return estimate_quantiles(snr, error_dist_from_name(dist), reps,
                                      prob_grid.empty() ? default_prob_grid() : prob_grid, seed, threads);
        },
        py::arg("snr"), py::arg("reps"), py::arg("seed") = 1, py::arg("dist") = "normal",
        py::arg("threads") = 0, py::arg("prob_grid") = std::vector<double>{});

    m.def("zeta_from_delta", &zeta_from_delta, py::arg("stages"), py::arg("delta"));

    m.def(
        "run_two_stage",
        [](const ChangePointModel& model, int64_t n, double zeta1, double lambda1, double gamma1,
           uint64_t seed, int64_t quantile_reps, const std::string& cache_dir) {
            StagePlan plan;
            plan.stages = 2;
            plan.lambda = {lambda1, 1.0 - lambda1};
            plan.gamma = {gamma1};
            plan.zeta = {zeta1};
            plan.K = {std::numeric_limits<double>::quiet_NaN()};
            plan.snr = model.snr();
            SimulatingQuantileProvider provider(cache_dir, quantile_reps, 777);
            ModelOracle oracle(model, n);
            RngStream rng(seed);
            RunResult run = run_experiment(oracle, plan, n, model.basis, rng, &provider, model.d0);
            py::dict d;
            d["estimate"] = fit_to_dict(run.final_fit());
            d["snr_used"] = run.snr_used;
            d["budget_used"] = run.budget_used;
            py::list windows;
            for (const auto& s : run.stages) windows.append(py::make_tuple(s.window.lo, s.window.hi));
            d["windows"] = windows;
            const CppQuantiles& table = provider.at_snr(run.snr_used);
            d["finite_sample_ci"] = ci_to_dict(
                finite_sample_ci(run.final_fit().d_av, n, table.C(zeta1), table.C(0.025), 0.05));
            return d;
        },
        py::arg("model"), py::arg("n"), py::arg("zeta1") = 0.0005, py::arg("lambda1") = 0.5,
        py::arg("gamma1") = 0.5, py::arg("seed") = 1, py::arg("quantile_reps") = 100000,
        py::arg("cache_dir") = ".adacp-cache");

    m.attr("__version__") = "0.1.0";
}

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "adacp/errors.hpp"
#include "adacp/rng.hpp"

namespace adacp {

// ---------------------------------------------------------------------------
// Basic covariate-response types
// ---------------------------------------------------------------------------

struct Sample {
    double x = 0.0;  // covariate in [0,1]
    double y = 0.0;  // response
};

// Closed sampling interval, clipped to [0,1] by construction helpers.
struct Window {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

inline Window clip_window(double lo, double hi) {
    Window w{std::max(0.0, lo), std::min(1.0, hi)};
    if (!(w.lo < w.hi)) throw DegenerateWindow("window [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty after clipping to [0,1]");
    return w;
}

// ---------------------------------------------------------------------------
// Segment bases: linear-in-parameters only (constant or affine in x), so each
// side of a candidate split has a closed-form least-squares fit.
// ---------------------------------------------------------------------------

enum class BasisKind { Stump, Affine };

inline int basis_dim(BasisKind b) { return b == BasisKind::Stump ? 1 : 2; }

inline double basis_eval(BasisKind b, const std::vector<double>& beta, double x) {
    return b == BasisKind::Stump ? beta[0] : beta[0] + beta[1] * x;
}

inline const char* basis_name(BasisKind b) { return b == BasisKind::Stump ? "stump" : "affine"; }
BasisKind basis_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Error distributions: mean 0, symmetric, unit sd (None is the degenerate
// zero-noise mode), all with finite moment generating function near 0.
// ---------------------------------------------------------------------------

enum class ErrorDist { Normal, Uniform, Laplace, None };

double draw_unit_error(ErrorDist d, RngStream& rng);
const char* error_dist_name(ErrorDist d);
ErrorDist error_dist_from_name(const std::string& name);

struct NoiseSpec {
    double sigma = 1.0;                       // homoscedastic sd
    std::function<double(double)> sigma_fn;   // set => heteroscedastic, sigma ignored
    ErrorDist dist = ErrorDist::Normal;

    bool heteroscedastic() const { return static_cast<bool>(sigma_fn); }
    double sigma_at(double x) const { return heteroscedastic() ? sigma_fn(x) : sigma; }
};

// ---------------------------------------------------------------------------
// Regression model with a single jump at d0: left branch owns the boundary,
// mu(x) = psi_l(beta_l, x) for x <= d0 and psi_u(beta_u, x) for x > d0.
// ---------------------------------------------------------------------------

struct ChangePointModel {
    double d0 = 0.5;
    BasisKind basis = BasisKind::Stump;
    std::vector<double> beta_l{0.0};
    std::vector<double> beta_u{1.0};
    NoiseSpec noise;
    double eps0 = 0.05;  // d0 is assumed to lie in [eps0, 1-eps0]

    double mu(double x) const {
        return x <= d0 ? basis_eval(basis, beta_l, x) : basis_eval(basis, beta_u, x);
    }
    // Signed jump at d0: lim_{x->d0+} mu(x) - mu(d0).
    double jump_gap() const { return basis_eval(basis, beta_u, d0) - basis_eval(basis, beta_l, d0); }
    double snr() const { return std::abs(jump_gap()) / noise.sigma_at(d0); }
    void validate() const;
};

// Piecewise-constant model with levels (alpha, beta) split at d0.
ChangePointModel make_stump_model(double alpha, double beta, double d0, double sigma,
                                  ErrorDist dist = ErrorDist::Normal);

inline double evaluate_mu(const ChangePointModel& m, double x) { return m.mu(x); }

// ---------------------------------------------------------------------------
// Oracles: every sampled response flows through one of these. The budget is
// fixed up front; each returned sample costs exactly one unit.
// ---------------------------------------------------------------------------

class Oracle {
public:
    virtual ~Oracle() = default;

    Sample query(double x, RngStream& rng) {
        check_budget(1);
        Sample s = do_query(x, rng);
        budget_used_ += 1;
        return s;
    }

    std::vector<Sample> query_batch(const std::vector<double>& xs, RngStream& rng) {
        check_budget(static_cast<int64_t>(xs.size()));
        std::vector<Sample> out = do_query_batch(xs, rng);
        budget_used_ += static_cast<int64_t>(xs.size());
        return out;
    }

    int64_t budget_total() const { return budget_total_; }
    int64_t budget_used() const { return budget_used_; }
    int64_t budget_left() const { return budget_total_ - budget_used_; }

protected:
    explicit Oracle(int64_t budget_total) : budget_total_(budget_total) {}

    virtual Sample do_query(double x, RngStream& rng) = 0;
    virtual std::vector<Sample> do_query_batch(const std::vector<double>& xs, RngStream& rng) {
        std::vector<Sample> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back(do_query(x, rng));
        return out;
    }

private:
    void check_budget(int64_t need) const {
        if (budget_used_ + need > budget_total_)
            throw BudgetExhausted("oracle budget exhausted: " + std::to_string(budget_used_) + "/" +
                                  std::to_string(budget_total_) + " used, " + std::to_string(need) + " more requested");
    }

    int64_t budget_total_;
    int64_t budget_used_ = 0;
};

// Draws y = mu(x) + sigma(x) * eps from the model.
class ModelOracle : public Oracle {
public:
    ModelOracle(ChangePointModel model, int64_t budget_total)
        : Oracle(budget_total), model_(std::move(model)) {}
    const ChangePointModel& model() const { return model_; }

protected:
    Sample do_query(double x, RngStream& rng) override {
        const double s = model_.noise.sigma_at(x);
        return Sample{x, model_.mu(x) + s * draw_unit_error(model_.noise.dist, rng)};
    }

private:
    ChangePointModel model_;
};

// Returns the stored pair whose covariate is nearest to the request
// (ties broken toward the smaller covariate). Duplicate hits are allowed.
class PoolOracle : public Oracle {
public:
    PoolOracle(std::vector<Sample> pool, int64_t budget_total);
    static PoolOracle from_csv(const std::string& path, int64_t budget_total);
    const std::vector<Sample>& pool() const { return pool_; }

protected:
    Sample do_query(double x, RngStream& rng) override;

private:
    std::vector<Sample> pool_;  // sorted by x
};

// Line-protocol subprocess oracle. Per batch the parent writes a handshake
// line "BATCH <k>" followed by k covariates (one per line) to the child's
// stdin, then reads k response lines from its stdout.
class ExternalOracle : public Oracle {
public:
    ExternalOracle(const std::string& command, int64_t budget_total);
    ~ExternalOracle() override;
    ExternalOracle(const ExternalOracle&) = delete;
    ExternalOracle& operator=(const ExternalOracle&) = delete;

protected:
    Sample do_query(double x, RngStream& rng) override;
    std::vector<Sample> do_query_batch(const std::vector<double>& xs, RngStream& rng) override;

private:
    struct Proc;
    std::unique_ptr<Proc> proc_;
};

std::vector<Sample> load_pool_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Covariate designs
// ---------------------------------------------------------------------------

std::vector<double> draw_uniform_covariates(const Window& w, int64_t count, RngStream& rng);

// Uniform-design grid: midpoints {lo + (2i-1)(hi-lo)/(2 count)}.
std::vector<double> equispaced_covariates(const Window& w, int64_t count);

// Symmetric density h on [-1,1], tabulated for inverse-CDF sampling.
class SymmetricDensity {
public:
    static SymmetricDensity uniform();
    static SymmetricDensity triangular();  // h(t) = 1 - |t|
    // values[i] = h at grid point -1 + 2i/(len-1); normalized on construction.
    static SymmetricDensity from_table(std::vector<double> values);

    double value_at_zero() const { return h0_; }
    double inverse_cdf(double u) const;  // u in [0,1] -> t in [-1,1]
    const std::string& name() const { return name_; }

private:
    SymmetricDensity() = default;
    std::vector<double> grid_;  // t values
    std::vector<double> cdf_;   // cdf at grid points, cdf.front()=0, back()=1
    double h0_ = 0.5;
    std::string name_;
};

std::vector<double> draw_density_covariates(const Window& w, int64_t count, const SymmetricDensity& h,
                                            RngStream& rng);

}  // namespace adacp

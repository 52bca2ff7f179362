#include "adacp/model.hpp"

#include <unistd.h>
#include <sys/wait.h>
#include <signal.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace adacp {

BasisKind basis_from_name(const std::string& name) {
    if (name == "stump") return BasisKind::Stump;
    if (name == "affine") return BasisKind::Affine;
    throw ValidationError("unknown basis '" + name + "' (expected stump|affine)");
}

double draw_unit_error(ErrorDist d, RngStream& rng) {
    switch (d) {
        case ErrorDist::Normal:
            return rng.normal();
        case ErrorDist::Uniform:
            // Unif(-sqrt(3), sqrt(3)) has sd 1.
            return rng.uniform(-1.7320508075688772, 1.7320508075688772);
        case ErrorDist::Laplace: {
            // Laplace with scale 1/sqrt(2) has sd 1; inverse CDF.
            const double u = rng.uniform01() - 0.5;
            const double b = 0.7071067811865476;
            return u < 0 ? b * std::log1p(2.0 * u) : -b * std::log1p(-2.0 * u);
        }
        case ErrorDist::None:
            return 0.0;
    }
    return 0.0;
}

const char* error_dist_name(ErrorDist d) {
    switch (d) {
        case ErrorDist::Normal: return "normal";
        case ErrorDist::Uniform: return "uniform";
        case ErrorDist::Laplace: return "laplace";
        case ErrorDist::None: return "none";
    }
    return "?";
}

ErrorDist error_dist_from_name(const std::string& name) {
    if (name == "normal") return ErrorDist::Normal;
    if (name == "uniform") return ErrorDist::Uniform;
    if (name == "laplace") return ErrorDist::Laplace;
    if (name == "none") return ErrorDist::None;
    throw ValidationError("unknown error distribution '" + name + "'");
}

void ChangePointModel::validate() const {
    if (!(eps0 > 0.0) || !(eps0 < 0.5))
        throw ValidationError("eps0 must lie in (0, 0.5)");
    if (!(d0 >= eps0 && d0 <= 1.0 - eps0))
        throw ValidationError("d0 must lie in [eps0, 1-eps0]");
    const int dim = basis_dim(basis);
    if (static_cast<int>(beta_l.size()) != dim || static_cast<int>(beta_u.size()) != dim)
        throw ValidationError("coefficient vectors must match the basis dimension");
    if (!(std::abs(jump_gap()) > 0.0))
        throw ValidationError("jump gap at d0 must be strictly positive");
    if (!noise.heteroscedastic() && noise.sigma < 0.0)
        throw ValidationError("sigma must be >= 0");
}

ChangePointModel make_stump_model(double alpha, double beta, double d0, double sigma, ErrorDist dist) {
    ChangePointModel m;
    m.d0 = d0;
    m.basis = BasisKind::Stump;
    m.beta_l = {alpha};
    m.beta_u = {beta};
    m.noise.sigma = sigma;
    m.noise.dist = dist;
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// PoolOracle
// ---------------------------------------------------------------------------

PoolOracle::PoolOracle(std::vector<Sample> pool, int64_t budget_total)
    : Oracle(budget_total), pool_(std::move(pool)) {
    if (pool_.empty()) throw ValidationError("pool oracle needs a nonempty pool");
    std::sort(pool_.begin(), pool_.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
    for (const Sample& s : pool_)
        if (s.x < 0.0 || s.x > 1.0) throw ValidationError("pool covariates must lie in [0,1]");
}

PoolOracle PoolOracle::from_csv(const std::string& path, int64_t budget_total) {
    return PoolOracle(load_pool_csv(path), budget_total);
}

Sample PoolOracle::do_query(double x, RngStream&) {
    auto it = std::lower_bound(pool_.begin(), pool_.end(), x,
                               [](const Sample& s, double v) { return s.x < v; });
    if (it == pool_.begin()) return *it;
    if (it == pool_.end()) return pool_.back();
    const Sample& above = *it;
    const Sample& below = *(it - 1);
    // ties go to the smaller covariate
    return (x - below.x) <= (above.x - x) ? below : above;
}

std::vector<Sample> load_pool_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open pool file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("pool file '" + path + "' is empty");
    // tolerate a UTF-8 BOM and trailing CR
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y") throw ValidationError("pool file must start with header 'x,y'");
    std::vector<Sample> pool;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        Sample s;
        char comma = 0;
        if (!(ss >> s.x >> comma >> s.y) || comma != ',')
            throw ValidationError("pool file '" + path + "': bad row at line " + std::to_string(lineno) + ": " + line);
        pool.push_back(s);
    }
    if (pool.empty()) throw ValidationError("pool file '" + path + "' has no data rows");
    return pool;
}

// ---------------------------------------------------------------------------
// ExternalOracle: bidirectional pipe to `/bin/sh -c command`
// ---------------------------------------------------------------------------

struct ExternalOracle::Proc {
    pid_t pid = -1;
    FILE* to_child = nullptr;
    FILE* from_child = nullptr;

    ~Proc() {
        if (to_child) fclose(to_child);
        if (from_child) fclose(from_child);
        if (pid > 0) {
            int status = 0;
            waitpid(pid, &status, 0);
        }
    }
};

ExternalOracle::ExternalOracle(const std::string& command, int64_t budget_total)
    : Oracle(budget_total), proc_(std::make_unique<Proc>()) {
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw ExternalOracleFailure("pipe() failed: " + std::string(std::strerror(errno)));
    const pid_t pid = fork();
    if (pid < 0) throw ExternalOracleFailure("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    proc_->pid = pid;
    proc_->to_child = fdopen(in_pipe[1], "w");
    proc_->from_child = fdopen(out_pipe[0], "r");
    if (!proc_->to_child || !proc_->from_child)
        throw ExternalOracleFailure("fdopen() failed for oracle process");
}

ExternalOracle::~ExternalOracle() = default;

std::vector<Sample> ExternalOracle::do_query_batch(const std::vector<double>& xs, RngStream&) {
    if (fprintf(proc_->to_child, "BATCH %zu\n", xs.size()) < 0)
        throw ExternalOracleFailure("failed to write handshake to oracle process");
    for (double x : xs) fprintf(proc_->to_child, "%.17g\n", x);
    if (fflush(proc_->to_child) != 0)
        throw ExternalOracleFailure("failed to flush request batch to oracle process");

    std::vector<Sample> out;
    out.reserve(xs.size());
    char buf[256];
    for (double x : xs) {
        if (!fgets(buf, sizeof(buf), proc_->from_child))
            throw ExternalOracleFailure("oracle process closed its output mid-batch");
        char* end = nullptr;
        errno = 0;
        const double y = std::strtod(buf, &end);
        // accept trailing whitespace/newline only
        while (end && (*end == ' ' || *end == '\t' || *end == '\r' || *end == '\n')) ++end;
        if (errno != 0 || end == buf || (end && *end != '\0') || !std::isfinite(y)) {
            std::string offending(buf);
            while (!offending.empty() && (offending.back() == '\n' || offending.back() == '\r'))
                offending.pop_back();
            throw ExternalOracleFailure("malformed oracle reply line: '" + offending + "'");
        }
        out.push_back(Sample{x, y});
    }
    return out;
}

Sample ExternalOracle::do_query(double x, RngStream& rng) {
    return do_query_batch({x}, rng).front();
}

// ---------------------------------------------------------------------------
// Covariate designs
// ---------------------------------------------------------------------------

static void check_window(const Window& w) {
    if (!(w.lo < w.hi)) throw DegenerateWindow("window has hi <= lo");
}

std::vector<double> draw_uniform_covariates(const Window& w, int64_t count, RngStream& rng) {
    check_window(w);
    std::vector<double> xs(count);
    for (auto& x : xs) x = rng.uniform(w.lo, w.hi);
    return xs;
}

std::vector<double> equispaced_covariates(const Window& w, int64_t count) {
    check_window(w);
    std::vector<double> xs(count);
    const double width = w.width();
    for (int64_t i = 0; i < count; ++i)
        xs[i] = w.lo + static_cast<double>(2 * i + 1) * width / static_cast<double>(2 * count);
    return xs;
}

SymmetricDensity SymmetricDensity::from_table(std::vector<double> values) {
    if (values.size() < 3) throw ValidationError("density table needs at least 3 points");
    const size_t m = values.size();
    const size_t mid = (m - 1) / 2;
    if (m % 2 == 0) throw ValidationError("density table needs an odd number of points (value at 0)");
    for (size_t i = 0; i < m; ++i) {
        if (values[i] < 0.0) throw ValidationError("density values must be nonnegative");
        if (std::abs(values[i] - values[m - 1 - i]) > 1e-9 * (1.0 + std::abs(values[i])))
            throw ValidationError("density table must be symmetric about 0");
    }
    SymmetricDensity d;
    d.grid_.resize(m);
    d.cdf_.resize(m);
    for (size_t i = 0; i < m; ++i) d.grid_[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(m - 1);
    // trapezoid cumulative, then normalize so cdf.back() == 1
    d.cdf_[0] = 0.0;
    for (size_t i = 1; i < m; ++i)
        d.cdf_[i] = d.cdf_[i - 1] + 0.5 * (values[i] + values[i - 1]) * (d.grid_[i] - d.grid_[i - 1]);
    const double total = d.cdf_.back();
    if (!(total > 0.0)) throw ValidationError("density integrates to zero");
    for (auto& c : d.cdf_) c /= total;
    d.h0_ = values[mid] / total;
    d.name_ = "table";
    return d;
}

SymmetricDensity SymmetricDensity::uniform() {
    auto d = from_table(std::vector<double>(129, 0.5));
    d.name_ = "uniform";
    return d;
}

SymmetricDensity SymmetricDensity::triangular() {
    std::vector<double> v(257);
    for (size_t i = 0; i < v.size(); ++i) {
        const double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(v.size() - 1);
        v[i] = 1.0 - std::abs(t);
    }
    auto d = from_table(std::move(v));
    d.name_ = "triangular";
    return d;
}

double SymmetricDensity::inverse_cdf(double u) const {
    if (u <= 0.0) return -1.0;
    if (u >= 1.0) return 1.0;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    size_t hi = std::min<size_t>(static_cast<size_t>(it - cdf_.begin()), cdf_.size() - 1);
    size_t lo = hi - 1;
    const double span = cdf_[hi] - cdf_[lo];
    if (span <= 0.0) return grid_[lo];  // flat (zero-density) cell
    const double f = (u - cdf_[lo]) / span;
    return grid_[lo] + f * (grid_[hi] - grid_[lo]);
}

std::vector<double> draw_density_covariates(const Window& w, int64_t count, const SymmetricDensity& h,
                                            RngStream& rng) {
    check_window(w);
    std::vector<double> xs(count);
    const double half = 0.5 * w.width();
    const double center = 0.5 * (w.lo + w.hi);
    for (auto& x : xs) x = center + half * h.inverse_cdf(rng.uniform01());
    return xs;
}

}  // namespace adacp

#pragma once

#include <span>
#include <vector>

#include "adacp/model.hpp"

namespace adacp {

// Result of a least-squares split search. The criterion is piecewise constant
// and right-continuous in the split location d, so its minimizing set is a
// union of closed intervals whose endpoints sit at sample covariates (a point
// attains the minimum through its value or its left limit). d_lo is the
// smallest minimizer, d_hi the largest: the jump location closing the last
// minimizing stretch, capped at the window edge.
struct SplitFit {
    double d_lo = 0.0;
    double d_hi = 0.0;
    double d_av = 0.0;  // (d_lo + d_hi) / 2
    std::vector<double> beta_l;
    std::vector<double> beta_u;
    double rss = 0.0;
    double sigma_hat = 0.0;
};

// Free-parameter fit: at every candidate split the per-side coefficients are
// re-estimated by closed-form least squares and the profiled RSS is compared.
// Candidate splits are the distinct sample covariates inside the window
// (plus the window's lower edge, the all-right split); candidates leaving
// fewer than basis_dim samples on a side, or a singular side, are skipped.
// All samples participate in the criterion regardless of the window; only the
// split location is constrained to it. beta hats are profiled at d_lo;
// sigma_hat = sqrt(rss / (n - 2 dim)).
SplitFit fit_free(std::span<const Sample> samples, const Window& window, BasisKind basis);

// Fixed-parameter fit: per-side coefficients are frozen and only the split
// moves. Every candidate is admissible (including the all-right split at the
// window's lower edge). beta hats in the result echo the inputs; sigma_hat is
// sqrt(rss/n) and is not used downstream (stage-one sigma_hat is reused).
SplitFit fit_fixed(std::span<const Sample> samples, const Window& window,
                   const std::vector<double>& beta_l, const std::vector<double>& beta_u,
                   BasisKind basis);

// The one-shot estimator on the full support: fit_free over [eps0, 1-eps0].
SplitFit classical_estimate(std::span<const Sample> samples, BasisKind basis, double eps0 = 0.0);

}  // namespace adacp

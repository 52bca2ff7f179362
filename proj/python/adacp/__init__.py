"""Budget-constrained multistage adaptive sampling for change-point estimation."""

from adacp._core import (
    ChangePointModel,
    CppQuantiles,
    OracleError,
    ValidationError,
    estimate_quantiles,
    evaluate_mu,
    fit_fixed,
    fit_free,
    run_two_stage,
    simulate_argmin,
    zeta_from_delta,
    __version__,
)

__all__ = [
    "ChangePointModel",
    "CppQuantiles",
    "OracleError",
    "ValidationError",
    "estimate_quantiles",
    "evaluate_mu",
    "fit_fixed",
    "fit_free",
    "run_two_stage",
    "simulate_argmin",
    "zeta_from_delta",
    "__version__",
]

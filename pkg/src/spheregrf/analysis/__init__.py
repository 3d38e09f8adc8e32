"""Error measurement, Monte Carlo convergence studies and reporting."""

from spheregrf.analysis.convergence import (
    ConvergenceRow,
    NoiseRow,
    fit_exponential_slope,
    fit_rate,
    fit_slope,
    monte_carlo_strong_error,
    noise_transfer_study,
    pairwise_rates,
    run_samples,
    sample_errors,
    summarize_convergence,
)
from spheregrf.analysis.error import lifted_l2_error

__all__ = [
    "ConvergenceRow",
    "NoiseRow",
    "fit_exponential_slope",
    "fit_rate",
    "fit_slope",
    "lifted_l2_error",
    "monte_carlo_strong_error",
    "noise_transfer_study",
    "pairwise_rates",
    "run_samples",
    "sample_errors",
    "summarize_convergence",
]

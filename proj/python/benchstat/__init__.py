"""Frequentist and Bayesian comparison of many classifiers over many datasets."""

from ._benchstat import (
    ErrorTable,
    InputError,
    McmcConfig,
    NumericalError,
    PosteriorDraws,
    ScoreMatrix,
    aggregate_errors,
    chi_square_sf,
    demsar,
    effective_sample_size,
    gamma_shape_rate_from_mode_sd,
    irrelevance_threshold,
    load_draws,
    posterior_predictive_check,
    psrf,
    rank_summary,
    read_errors,
    run_bayes,
    studentized_range_sf,
    synthesize,
)

__all__ = [
    "ErrorTable",
    "InputError",
    "McmcConfig",
    "NumericalError",
    "PosteriorDraws",
    "ScoreMatrix",
    "aggregate_errors",
    "chi_square_sf",
    "demsar",
    "effective_sample_size",
    "gamma_shape_rate_from_mode_sd",
    "irrelevance_threshold",
    "load_draws",
    "posterior_predictive_check",
    "psrf",
    "rank_summary",
    "read_errors",
    "run_bayes",
    "studentized_range_sf",
    "synthesize",
]

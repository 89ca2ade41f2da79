"""Worst-case false alarm estimation and extrapolation for speaker
verification scores."""

from ._core import (  # noqa: F401
    PairScoreTable,
    WcfaError,
    __version__,
    empirical_curve,
    extrapolate,
    fit,
    fit_generative_baseline,
    generate_synthetic_table,
    gradcheck,
    min_dcf_threshold,
    oracle_curve,
    plda_llr,
    simultaneous_diagonalize,
    validate_mae,
    worst_case_fa,
    zero_effort_fa,
)

"""Variational Bayesian model averaging for binary classification under an HMM."""

from ._vbma import (
    FitResult,
    VbmaError,
    __version__,
    averaged_posterior,
    benchmark,
    classify,
    cli,
    fit,
    fit_collection,
    forward_backward,
    is_weights,
    oracle_weights,
    pe_weights,
    simulate,
    total_variation,
    vb_weights,
)

__all__ = [
    "FitResult",
    "VbmaError",
    "__version__",
    "averaged_posterior",
    "benchmark",
    "classify",
    "cli",
    "fit",
    "fit_collection",
    "forward_backward",
    "is_weights",
    "oracle_weights",
    "pe_weights",
    "simulate",
    "total_variation",
    "vb_weights",
]

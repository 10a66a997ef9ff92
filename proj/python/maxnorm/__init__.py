"""Max-norm constrained matrix completion."""

from ._maxnorm import (
    Divergence,
    InvalidInput,
    estimate_rank,
    fit,
    make_ground_truth,
    matrix_norms,
    packing_generate,
    rademacher_sign_sup,
    rate_bounds,
    simulate,
    spectral_magnitude,
)

__all__ = [
    "Divergence",
    "InvalidInput",
    "estimate_rank",
    "fit",
    "make_ground_truth",
    "matrix_norms",
    "packing_generate",
    "rademacher_sign_sup",
    "rate_bounds",
    "simulate",
    "spectral_magnitude",
]

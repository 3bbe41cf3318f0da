"""Exact truncated power series over the Gaussian rationals."""

from ._backend import BACKEND
from .core import (
    TruncatedSeries,
    invert_unit,
    linear_combination,
    mul,
    partial_derivative,
    shift_polynomial,
    substitute,
)
from .gaussian import GaussianRational, I
from .implicit import solve_implicit
from .linalg import (
    constant_matrix,
    det_exact,
    det_series,
    det_univariate,
    exact_divide,
    invert_series_matrix,
    rank_exact,
    solve_exact,
)
from .ring import Ring, meet_all
from .text import to_text

__all__ = [
    "BACKEND",
    "GaussianRational",
    "I",
    "Ring",
    "TruncatedSeries",
    "constant_matrix",
    "det_exact",
    "det_series",
    "det_univariate",
    "exact_divide",
    "invert_series_matrix",
    "invert_unit",
    "linear_combination",
    "meet_all",
    "mul",
    "partial_derivative",
    "rank_exact",
    "shift_polynomial",
    "solve_exact",
    "solve_implicit",
    "substitute",
    "to_text",
]

"""Minimax polynomial and free-knot spline approximation.

Thin Python surface over the C++ core: every function returns plain dicts
mirroring the JSON reports emitted by the `alternant` CLI.
"""

from ._core import (
    beta_alternance,
    check_free_knots,
    descend_free_knots,
    fit_poly,
    fit_spline,
    oracle_minimax_poly,
)

__all__ = [
    "beta_alternance",
    "check_free_knots",
    "descend_free_knots",
    "fit_poly",
    "fit_spline",
    "oracle_minimax_poly",
]

__version__ = "0.1.0"

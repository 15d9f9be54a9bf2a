"""Smoke tests for the Python surface of the approximation core."""

import math

import pytest

import alternant


def test_fit_poly_squared_halved_deviation():
    # Best line for t^2 on [0, 1] deviates by 1/8 and equioscillates at
    # {0, 1/2, 1}.
    rep = alternant.fit_poly("poly:0,0,1", degree=1, interval=(0.0, 1.0))
    assert rep["status"] == "beta-plus-optimal"
    assert rep["final_norm"] == pytest.approx(0.125, abs=1e-6)
    pts = rep["alternating_points"]
    assert len(pts) >= 3
    for expected in (0.0, 0.5, 1.0):
        assert min(abs(p - expected) for p in pts) < 1e-3


def test_fit_poly_accepts_python_callable():
    # Best degree-1 fit of |t| on [-1, 1] is the constant 1/2: error 1/2.
    rep = alternant.fit_poly(lambda t: abs(t), degree=1, interval=(-1.0, 1.0))
    assert rep["final_norm"] == pytest.approx(0.5, rel=1e-3)


def test_beta_alternance_counts_cosine_swings():
    # cos(t) alternates through +-1 at {0, pi, 2pi, 3pi} inside [0, 9.5].
    seq = alternant.beta_alternance("cos", beta=0.95, interval=(0.0, 9.5))
    assert seq["eps"] == 1
    assert len(seq["pairs"]) == 4


def test_fit_spline_exact_when_kink_is_a_knot():
    rep = alternant.fit_spline(
        "abs", knots=[-1.0, 0.0, 1.0], degrees=[1, 1], interval=(-1.0, 1.0)
    )
    assert rep["status"] == "degenerate"
    assert rep["final_norm"] < 1e-8


def test_fit_spline_reports_certificate():
    rep = alternant.fit_spline(
        "abs", knots=[-1.0, 0.3, 1.0], degrees=[1, 1], interval=(-1.0, 1.0)
    )
    assert rep["status"] == "beta-plus-optimal"
    assert rep["final_norm"] == pytest.approx(0.3 / 1.3, rel=1e-5)
    assert rep["certificate"] is not None
    assert rep["certificate"]["count"] >= rep["certificate"]["required"]


def test_free_knot_check_flags_misplaced_knot():
    rep = alternant.check_free_knots(
        "abs", knots=[-1.0, 0.3, 1.0], degrees=[1, 1], interval=(-1.0, 1.0)
    )
    assert rep["verdict"] == "violated-at"


def test_free_knot_descent_reaches_corner():
    res = alternant.descend_free_knots(
        "abs",
        knots=[-1.0, 0.3, 1.0],
        degrees=[1, 1],
        interval=(-1.0, 1.0),
        max_moves=30,
    )
    assert res["theta_history"][0] > res["theta_history"][-1]
    assert res["theta_history"][-1] < 0.02


def test_oracle_agrees_with_fit():
    rep = alternant.fit_poly("exp", degree=3, interval=(-1.0, 1.0))
    ora = alternant.oracle_minimax_poly("exp", degree=3, interval=(-1.0, 1.0))
    assert math.isclose(rep["final_norm"], ora["value"], rel_tol=5e-2)
    assert 0.99 * rep["final_norm"] <= ora["value"] + 1e-12

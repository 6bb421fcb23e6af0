"""The two routes to the covariances a..f must agree, obey the exact
symmetries, and reproduce the integer-flux and small-R limits."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abwave.moments import (
    FluxParameter,
    MomentSet,
    moments_by_sum,
    moments_by_sum_grid,
    moments_closed,
)
from abwave.specfun import DomainError, gamma

# regression anchors at (beta=0.25, R=2): frozen after cross-validation of
# the ladder sums against the closed forms and the mpmath Bessel oracle
_ANCHOR_BETA, _ANCHOR_R = 0.25, 2.0
_ANCHOR = {
    "a": 0.5417906325647348,
    "b": -0.04391662939529099,
    "c": 0.07313054067469142,
    "d": 0.22291353528678506,
    "e": -0.009627479447797863,
    "f": 0.257849666886482,
}


def test_flux_decomposition_examples():
    for alpha, n, beta in [(0.0, 0, 0.0), (0.25, 0, 0.25), (0.5, 0, 0.5),
                           (0.6, 1, -0.4), (1.35, 1, 0.35), (-0.5, -1, 0.5),
                           (1.5, 1, 0.5), (-0.25, 0, -0.25)]:
        f = FluxParameter(alpha)
        assert f.n == n
        assert abs(f.beta - beta) < 1e-15
        assert abs(f.n + f.beta - alpha) < 1e-15


@given(st.floats(min_value=-50.0, max_value=50.0))
@settings(max_examples=100, deadline=None)
def test_flux_decomposition_property(alpha):
    f = FluxParameter(alpha)
    assert -0.5 < f.beta <= 0.5
    assert abs(f.n + f.beta - alpha) < 1e-12 * max(1.0, abs(alpha))


def test_integer_flux_values():
    # a = 1/2, d = f = 1/4, b = c = e = 0 at zero flux
    for R in (0.5, 3.0, 12.0, 30.0):
        for ms in (moments_by_sum(FluxParameter(0.0), R),
                   moments_closed(FluxParameter(0.0), R)):
            assert abs(ms.a - 0.5) <= 1e-12
            assert abs(ms.d - 0.25) <= 1e-12
            assert abs(ms.f - 0.25) <= 1e-12
            assert abs(ms.b) <= 1e-12
            assert abs(ms.c) <= 1e-12
            assert abs(ms.e) <= 1e-12


def test_integer_flux_carries_circulation():
    # at alpha = n != 0 the unobservable integer charge circulates:
    # c = n a / R and f = 1/4 + n^2 a / R^2, so R c/a recovers n exactly
    n = 2
    for R in (0.5, 3.0, 12.0):
        ms = moments_by_sum(FluxParameter(float(n)), R)
        assert abs(ms.a - 0.5) <= 1e-12
        assert abs(ms.c - n * ms.a / R) <= 1e-12
        assert abs(ms.f - (0.25 + n * n * ms.a / R ** 2)) <= 1e-12
        assert abs(ms.e) <= 1e-12
        assert abs(R * ms.c / ms.a - n) <= 1e-11


def test_parity_in_beta():
    # a, b, d, f even; c, e odd
    for R in (0.7, 2.0, 9.0):
        for beta in (0.05, 0.25, 0.375, 0.49):
            p = moments_by_sum(FluxParameter(beta), R)
            m = moments_by_sum(FluxParameter(-beta), R)
            for name in "abdf":
                assert abs(getattr(p, name) - getattr(m, name)) <= 1e-12
            for name in "ce":
                assert abs(getattr(p, name) + getattr(m, name)) <= 1e-12


def test_sign_flip_example():
    p = moments_by_sum(FluxParameter(0.25), 2.0)
    m = moments_by_sum(FluxParameter(-0.25), 2.0)
    assert p.c > 0 and abs(m.c + p.c) < 1e-14
    assert abs(m.e + p.e) < 1e-14


def test_equivalence_closed_vs_sum_spot_grid():
    worst = 0.0
    for beta in (0.05, -0.05, 0.25, -0.375, 0.49, -0.49):
        for R in (0.1, 0.9, 3.3, 10.0, 21.7, 30.0):
            s = moments_by_sum(FluxParameter(beta), R).as_array()
            c = moments_closed(FluxParameter(beta), R).as_array()
            worst = max(worst, np.max(np.abs(s - c) / (1.0 + np.abs(s))))
    assert worst <= 1e-10, worst


def test_equivalence_with_integer_part():
    for alpha in (1.25, -2.375, 3.49):
        for R in (0.5, 5.0, 18.0):
            s = moments_by_sum(FluxParameter(alpha), R).as_array()
            c = moments_closed(FluxParameter(alpha), R).as_array()
            assert np.max(np.abs(s - c) / (1.0 + np.abs(s))) <= 1e-10


def test_closed_edge_delegation():
    # within 1e-6 of beta = 0 and 1/2 the sums are authoritative
    for beta in (1e-9, 0.5, 0.5 - 1e-9, -0.5 + 1e-9 + 1e-9):
        R = 4.0
        s = moments_by_sum(FluxParameter(beta), R).as_array()
        c = moments_closed(FluxParameter(beta), R).as_array()
        assert np.array_equal(s, c)


@given(st.floats(min_value=-0.49, max_value=0.49),
       st.floats(min_value=0.05, max_value=30.0))
@settings(max_examples=60, deadline=None)
def test_positive_definiteness(beta, R):
    ms = moments_by_sum(FluxParameter(beta), R)
    assert ms.a > 0.0
    assert ms.q_rad > 0.0
    assert ms.q_azi > 0.0


def test_small_R_leading_behavior():
    # a ~ (R/2)^(2 beta) / (2 Gamma^2(1+beta)) as R -> 0.  The relative
    # correction is the next mode, (R/2)^(2-4 beta) G1/G2, so the 1% window
    # at R = 1e-3 only covers beta away from 1/2; near the edge the
    # two-mode form is checked instead.
    R = 1e-3
    for beta in (0.1, 0.25, 0.3):
        lead = (R / 2.0) ** (2.0 * beta) / (2.0 * gamma(1.0 + beta) ** 2)
        a = moments_by_sum(FluxParameter(beta), R).a
        assert abs(a / lead - 1.0) <= 0.01
    for beta in (0.375, 0.45, 0.49):
        p2 = (R / 2.0) ** (2.0 * beta) / gamma(1.0 + beta) ** 2
        q2 = (R / 2.0) ** (2.0 - 2.0 * beta) / gamma(2.0 - beta) ** 2
        a = moments_by_sum(FluxParameter(beta), R).a
        assert abs(a / (0.5 * (p2 + q2)) - 1.0) <= 0.01


def test_grid_evaluation_matches_scalar():
    Rs = np.array([0.3, 1.0, 4.5, 22.0])
    g = moments_by_sum_grid(FluxParameter(0.375), Rs)
    for i, R in enumerate(Rs):
        ms = moments_by_sum(FluxParameter(0.375), float(R))
        for k in "abcdef":
            # recurrence depth differs between grid and scalar paths, so
            # agreement is to rounding, not bitwise
            assert abs(g[k][i] - getattr(ms, k)) <= 1e-13 * max(1.0, abs(getattr(ms, k)))


def test_regression_anchor():
    ms = moments_by_sum(FluxParameter(_ANCHOR_BETA), _ANCHOR_R)
    for k, ref in _ANCHOR.items():
        assert abs(getattr(ms, k) - ref) <= 1e-13 * max(1.0, abs(ref))
    assert ms.a > 0 and ms.q_rad > 0 and ms.q_azi > 0


def test_domain_errors():
    with pytest.raises(DomainError):
        moments_by_sum(FluxParameter(0.25), 0.0)
    with pytest.raises(DomainError):
        moments_closed(FluxParameter(0.25), -1.0)
    with pytest.raises(DomainError):
        FluxParameter(float("nan"))
    with pytest.raises(DomainError):
        FluxParameter.from_beta(0.7)

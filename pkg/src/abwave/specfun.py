"""Scalar special-function kernels.

Everything downstream reduces to four primitives evaluated in double
precision:

    gamma(x)                 Gamma function, x > 0
    bessel_j(nu, x)          J_nu(x), fractional order nu >= -1
    hyp2f3 / hyp2f1          generalized hypergeometric series
    bessel_tail_sum(nu, x)   A_nu(x) = sum_{j>=1} J_{j+nu}^2(x)

Bessel values are produced by backward (Miller-type) recurrence along the
order ladder nu0, nu0+1, ..., normalized with the ascending-series anchor

    (x/2)^nu0 = sum_k (nu0 + 2k) Gamma(nu0 + k)/k! * J_{nu0+2k}(x),

which is stable for every x in the supported range (forward recurrence in
the order is violently unstable once nu > x).  The tail sum A_nu has two
independent routes: a 2F3 closed form used for x <= X_SWITCH and direct
truncated summation above; both must agree in the overlap window.

The alternating 2F3 series at z = -x^2 loses roughly 0.87*x decimal digits
to cancellation, so it is summed in extended precision (mpmath) and rounded
once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

__all__ = [
    "Accuracy",
    "DEFAULT_ACCURACY",
    "DomainError",
    "NonConvergenceError",
    "X_SWITCH",
    "gamma",
    "bessel_j",
    "bessel_j_prime",
    "bessel_j_batch",
    "bessel_ladder",
    "bessel_ladder_table",
    "bessel_tail_sum",
    "hyp2f1",
    "hyp2f3",
    "sum_truncation",
]


class DomainError(ValueError):
    """Argument outside the supported domain of a kernel."""


class NonConvergenceError(RuntimeError):
    """A series hit its term cap before reaching the requested tolerance."""


@dataclass(frozen=True)
class Accuracy:
    """Series accuracy budget: relative tolerance and term cap."""

    rel_tol: float = 1e-16
    max_terms: int = 400

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise DomainError(f"rel_tol must be in (0, 1e-6], got {self.rel_tol}")
        if self.max_terms < 50:
            raise DomainError(f"max_terms must be >= 50, got {self.max_terms}")


DEFAULT_ACCURACY = Accuracy()

# switch between the 2F3 closed form and direct summation for A_nu(x)
X_SWITCH = 30.0

# Miller recurrence overflow guards
_BIG = 1e250
_INV_BIG = 1e-250

_X_MAX = 500.0


def sum_truncation(x: float) -> int:
    """Half-width L of the order ladder needed at argument x.

    J_nu(x) decays super-exponentially once nu exceeds x by a few Airy
    widths x^(1/3); the margin keeps the discarded tail below 1e-16.
    """
    return int(math.ceil(x + 12.0 * (x + 1.0) ** (1.0 / 3.0) + 20.0))


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------

def gamma(x: float) -> float:
    """Gamma(x) for x > 0 (poles and negative arguments are never needed)."""
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


# ---------------------------------------------------------------------------
# Bessel J by backward recurrence
# ---------------------------------------------------------------------------

def _ladder_anchor_coeffs(s: float, kmax: int) -> np.ndarray:
    # coefficients (s+2k) Gamma(s+k)/k! of the normalization series; the
    # k = 0 coefficient is Gamma(s+1) (s*Gamma(s) continued through s = 0)
    ks = np.arange(kmax + 1, dtype=float)
    out = np.empty(kmax + 1)
    out[0] = math.gamma(s + 1.0)
    if kmax >= 1:
        lg = np.array([math.lgamma(s + k) - math.lgamma(k + 1.0) for k in ks[1:]])
        out[1:] = (s + 2.0 * ks[1:]) * np.exp(lg)
    return out


def bessel_ladder(s: float, x: float, n_orders: int) -> np.ndarray:
    """J_{s+m}(x) for m = 0 .. n_orders-1, ladder base s in [0, 1], x > 0."""
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"ladder base must be in [0, 1], got {s}")
    if n_orders < 1:
        raise DomainError("n_orders must be positive")
    if x <= 0.0:
        raise DomainError("bessel_ladder requires x > 0")
    if x < 1e-8:
        # two ascending-series terms are exact to double precision here
        m = s + np.arange(n_orders)
        lg = np.array([math.lgamma(v + 1.0) for v in m])
        lead = np.exp(m * math.log(0.5 * x) - lg)
        return lead * (1.0 - (0.25 * x * x) / (m + 1.0))
    m_top = n_orders + int(math.ceil(max(x - s, 0.0))) + sum_truncation(x) - int(x)
    out = np.empty(m_top + 1)
    yp = 0.0
    yc = 1e-150
    out[m_top] = yc
    for m in range(m_top, 0, -1):
        ym = (2.0 * (s + m) / x) * yc - yp
        yp, yc = yc, ym
        out[m - 1] = yc
        if abs(yc) > _BIG:
            yp *= _INV_BIG
            yc *= _INV_BIG
            out[m - 1:] *= _INV_BIG
    kmax = (m_top - 1) // 2
    coeffs = _ladder_anchor_coeffs(s, kmax)
    norm = float(np.dot(coeffs, out[0:2 * kmax + 1:2]))
    return out[:n_orders] * ((0.5 * x) ** s / norm)


def bessel_ladder_table(s: float, xs: np.ndarray, n_orders: int) -> np.ndarray:
    """Vectorized ladder: J_{s+m}(x_j) with shape (n_orders, len(xs)).

    Shares one recurrence sweep across all arguments; per-column rescaling
    keeps the unnormalized iterates inside the double range.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1:
        raise DomainError("xs must be one-dimensional")
    if np.any(xs < 0.0):
        raise DomainError("bessel_ladder_table requires x >= 0")
    out = np.zeros((n_orders, len(xs)))
    zero = xs == 0.0
    if zero.any() and s == 0.0:
        out[0, zero] = 1.0
    small = (~zero) & (xs < 1e-8)
    if small.any():
        m = s + np.arange(n_orders)
        lg = np.array([math.lgamma(v + 1.0) for v in m])
        lead = np.exp(np.outer(m, np.log(0.5 * xs[small])) - lg[:, None])
        out[:, small] = lead * (1.0 - 0.25 * xs[small] ** 2 / (m[:, None] + 1.0))
    live = (~zero) & (~small)
    if not live.any():
        return out
    x = xs[live]
    xmax = float(x.max())
    m_top = n_orders + int(math.ceil(max(xmax - s, 0.0))) + sum_truncation(xmax) - int(xmax)
    raw = np.empty((m_top + 1, len(x)))
    yp = np.zeros(len(x))
    yc = np.full(len(x), 1e-150)
    raw[m_top] = yc
    for m in range(m_top, 0, -1):
        ym = (2.0 * (s + m) / x) * yc - yp
        yp, yc = yc, ym
        raw[m - 1] = yc
        big = np.abs(yc) > _BIG
        if big.any():
            yp[big] *= _INV_BIG
            yc[big] *= _INV_BIG
            raw[m - 1:, big] *= _INV_BIG
    kmax = (m_top - 1) // 2
    coeffs = _ladder_anchor_coeffs(s, kmax)
    norm = coeffs @ raw[0:2 * kmax + 1:2]
    out[:, live] = raw[:n_orders] * ((0.5 * x) ** s / norm)
    return out


def _check_bessel_domain(nu: float, x: float) -> None:
    if not math.isfinite(nu) or not math.isfinite(x):
        raise DomainError("bessel_j arguments must be finite")
    if x < 0.0 or x > _X_MAX:
        raise DomainError(f"bessel_j requires 0 <= x <= {_X_MAX}, got x={x}")
    if nu < -1.0 or nu > x + 200.0:
        raise DomainError(f"bessel_j requires -1 <= nu <= x + 200, got nu={nu}")


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind, real order nu >= -1, 0 <= x <= 500."""
    _check_bessel_domain(nu, x)
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if nu < 0.0:
        # one stable downward step from the positive-order ladder
        s = nu + 1.0
        j = bessel_ladder(s, x, 2)
        return (2.0 * s / x) * j[0] - j[1]
    s, k = math.modf(nu)
    k = int(k)
    vals = bessel_ladder(s, x, k + 1)
    return float(vals[k])


def bessel_j_prime(nu: float, x: float) -> float:
    """dJ_nu/dx = (J_{nu-1}(x) - J_{nu+1}(x)) / 2 for nu >= 0, x > 0."""
    if x <= 0.0:
        if nu >= 1.0 and x == 0.0:
            return 0.5 if nu == 1.0 else 0.0
        raise DomainError("bessel_j_prime requires x > 0 for nu < 1")
    if nu < 0.0:
        raise DomainError("bessel_j_prime requires nu >= 0")
    s, k = math.modf(nu)
    k = int(k)
    vals = bessel_ladder(s, x, k + 2)
    jm1 = (2.0 * nu / x) * vals[k] - vals[k + 1] if k == 0 else vals[k - 1]
    return 0.5 * (jm1 - vals[k + 1])


def ladder_bases(beta: float) -> tuple[float, float]:
    """Order-ladder bases {b+m} and {(1-b)+m} for fractional flux beta."""
    b = abs(beta)
    if b > 0.5 + 1e-12:
        raise DomainError(f"|beta| must be <= 1/2, got {beta}")
    return b, 1.0 - b


def bessel_j_batch(alpha: float, x: float, L: int) -> list[tuple[int, float]]:
    """(ell, J_{|ell-alpha|}(x)) for ell = n-L .. n+L, n the nearest integer.

    Evaluated by one backward recurrence along each of the two order
    ladders nu = ell - alpha (ell >= n+1) and nu = alpha - ell (ell <= n).
    """
    if L < 0:
        raise DomainError("L must be non-negative")
    n = int(math.ceil(alpha - 0.5))
    beta = alpha - n
    b = abs(beta)
    if x == 0.0:
        return [(ell, 1.0 if abs(ell - alpha) == 0.0 else 0.0)
                for ell in range(n - L, n + L + 1)]
    _check_bessel_domain(b, x)
    lo = bessel_ladder(b, x, L + 1)        # orders b, b+1, ..., b+L
    hi = bessel_ladder(1.0 - b, x, L)      # orders 1-b, 2-b, ..., L-b
    out = {}
    if beta >= 0.0:
        for m in range(L + 1):
            out[n - m] = lo[m]             # |ell-alpha| = b + m
        for m in range(L):
            out[n + 1 + m] = hi[m]         # |ell-alpha| = 1-b + m
    else:
        for m in range(L + 1):
            out[n + m] = lo[m]
        for m in range(L):
            out[n - 1 - m] = hi[m]
    return [(ell, float(out[ell])) for ell in sorted(out) if abs(ell - n) <= L]


# ---------------------------------------------------------------------------
# hypergeometric series
# ---------------------------------------------------------------------------

def _is_nonpositive_integer(v: float) -> bool:
    return v <= 0.0 and float(v).is_integer()


def hyp2f3(a1: float, a2: float, b1: float, b2: float, b3: float, z: float,
           acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """2F3(a1, a2; b1, b2, b3; z) by direct summation.

    Summed with mpmath at a working precision that absorbs the alternating
    cancellation for z = -x^2 (~0.87*sqrt(-z) digits), then rounded once.
    """
    for b in (b1, b2, b3):
        if _is_nonpositive_integer(b):
            raise DomainError(f"lower parameter is a non-positive integer: {b}")
    if z == 0.0:
        return 1.0
    extra = int(math.ceil(0.87 * math.sqrt(-z))) if z < 0.0 else 0
    dps = 25 + extra
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        # promote once so every Pochhammer factor is exact at working precision
        ma1, ma2 = mpmath.mpf(a1), mpmath.mpf(a2)
        mb1, mb2, mb3 = mpmath.mpf(b1), mpmath.mpf(b2), mpmath.mpf(b3)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        stop = mpmath.mpf(10) ** (-(dps - 3))
        for j in range(acc.max_terms):
            term *= ((ma1 + j) * (ma2 + j) * zz
                     / ((mb1 + j) * (mb2 + j) * (mb3 + j) * (j + 1)))
            total += term
            if abs(term) < (1 + abs(total)) * min(stop, mpmath.mpf(acc.rel_tol)):
                return float(total)
        raise NonConvergenceError(
            f"2F3 series did not converge in {acc.max_terms} terms (z={z})")


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss 2F1(a, b; c; z) for z in [0, 1), c > 0, by plain series."""
    if not (0.0 <= z < 1.0):
        raise DomainError(f"hyp2f1 requires z in [0, 1), got {z}")
    if c <= 0.0:
        raise DomainError(f"hyp2f1 requires c > 0, got {c}")
    term = 1.0
    total = 1.0
    # ratio -> z, so the cap scales with 1/(1-z)
    cap = max(2000, int(60.0 / max(1e-4, 1.0 - z)))
    for j in range(cap):
        term *= (a + j) * (b + j) * z / ((c + j) * (j + 1))
        total += term
        if abs(term) <= 1e-15 * abs(total):
            return total
    raise NonConvergenceError(f"2F1 series did not converge (z={z}, c={c})")


# ---------------------------------------------------------------------------
# the fundamental tail sum A_nu
# ---------------------------------------------------------------------------

def _tail_sum_closed(nu: float, x: float, acc: Accuracy) -> float:
    # A_nu = -J_nu^2/2 + pref * 2F3(nu, nu+1/2; 1+nu, 1+nu, 1+2nu; -x^2)
    # with pref = 4^-nu nu x^(2nu) Gamma(2nu) / (Gamma(1+nu)^2 Gamma(1+2nu));
    # nu*Gamma(2nu) -> 1/2 as nu -> 0, where the 2F3 degenerates to 1.
    jnu = bessel_j(nu, x)
    if nu == 0.0:
        return 0.5 * (1.0 - jnu * jnu)
    ln_pref = (-nu * math.log(4.0) + 2.0 * nu * math.log(x)
               + math.lgamma(2.0 * nu) - 2.0 * math.lgamma(1.0 + nu)
               - math.lgamma(1.0 + 2.0 * nu))
    pref = nu * math.exp(ln_pref)
    F = hyp2f3(nu, nu + 0.5, 1.0 + nu, 1.0 + nu, 1.0 + 2.0 * nu, -x * x, acc)
    return -0.5 * jnu * jnu + pref * F


def _tail_sum_direct(nu: float, x: float) -> float:
    s, k = math.modf(nu)
    k = int(k)
    count = k + sum_truncation(x) + 2
    vals = bessel_ladder(s, x, count)
    tail = vals[k + 1:]
    return float(np.dot(tail, tail))


def bessel_tail_sum(nu: float, x: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """A_nu(x) = sum_{j=1}^inf J_{j+nu}^2(x).

    Uses the 2F3 closed form for x <= X_SWITCH and direct truncated
    summation beyond; the two branches agree to 1e-10 in the overlap.
    """
    if nu < 0.0:
        raise DomainError(f"bessel_tail_sum requires nu >= 0, got {nu}")
    if x < 0.0:
        raise DomainError("bessel_tail_sum requires x >= 0")
    if x == 0.0:
        return 0.0
    if x <= X_SWITCH:
        return _tail_sum_closed(nu, x, acc)
    return _tail_sum_direct(nu, x)

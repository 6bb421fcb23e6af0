"""Field covariances of the flux-scattered random wave ensemble.

Writing the field as Psi = xi + i*eta and R = kr, six covariances of the
field and its first derivatives determine every vortex statistic:

    a = <xi^2>                 = 1/2 sum_l J^2
    b = <xi d_R xi>            = 1/2 sum_l J J'
    c = <xi d_th eta>/R        = 1/(2R) sum_l l J^2
    d = <(d_R xi)^2>           = 1/2 sum_l J'^2
    e = <d_R xi d_th eta>/R    = 1/(2R) sum_l l J J'
    f = <(d_th xi)^2>/R^2      = 1/(2R^2) sum_l l^2 J^2

with J = J_{|l-alpha|}(R).  `moments_by_sum` evaluates the truncated
ladder sums directly; `moments_closed` evaluates the equivalent closed
forms built from the tail sums A_nu and a handful of Bessel products.
The two routes are independent down to the shared Bessel kernel and must
agree to 1e-10, which is the module's standing cross-check.

All quantities are dimensionless in R = kr; as a density over physical r
they pick up a factor k^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import (
    Accuracy,
    DEFAULT_ACCURACY,
    DomainError,
    bessel_j,
    bessel_ladder_table,
    bessel_tail_sum,
    ladder_bases,
    sum_truncation,
)

__all__ = ["FluxParameter", "MomentSet", "moments_by_sum", "moments_closed",
           "moments_by_sum_grid"]

# below this distance from beta = 0 or |beta| = 1/2 the closed forms sit on
# removable 0/0 structures; the ladder sums are authoritative there
_BETA_EDGE = 1e-6


@dataclass(frozen=True)
class FluxParameter:
    """Dimensionless flux alpha split as nearest integer n plus fraction beta.

    The decomposition alpha = n + beta with -1/2 < beta <= 1/2 is unique
    once the tie beta = 1/2 is preferred over -1/2.
    """

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError("flux must be finite")

    @property
    def n(self) -> int:
        return int(math.ceil(self.alpha - 0.5))

    @property
    def beta(self) -> float:
        return self.alpha - self.n

    @classmethod
    def from_beta(cls, beta: float) -> "FluxParameter":
        if not -0.5 < beta <= 0.5:
            raise DomainError(f"beta must lie in (-1/2, 1/2], got {beta}")
        return cls(float(beta))


def _as_flux(flux) -> FluxParameter:
    return flux if isinstance(flux, FluxParameter) else FluxParameter(float(flux))


@dataclass(frozen=True)
class MomentSet:
    """The six covariances at fixed (R, flux)."""

    R: float
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d, self.e, self.f])

    @property
    def q_rad(self) -> float:
        """Radial-block determinant a*d - b^2 (positive definiteness)."""
        return self.a * self.d - self.b * self.b

    @property
    def q_azi(self) -> float:
        """Azimuthal-block determinant a*f - c^2 (positive definiteness)."""
        return self.a * self.f - self.c * self.c


# ---------------------------------------------------------------------------
# route 1: truncated ladder sums
# ---------------------------------------------------------------------------

def moments_by_sum_grid(flux, R: np.ndarray,
                        acc: Accuracy = DEFAULT_ACCURACY) -> dict[str, np.ndarray]:
    """Vectorized ladder sums over an array of radii.

    Returns arrays a, b, c, d, e, f of the same length as R.  One backward
    recurrence per ladder serves the whole grid.
    """
    flux = _as_flux(flux)
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0.0):
        raise DomainError("moments require R > 0")
    n, beta = flux.n, flux.beta
    b_lo, b_hi = ladder_bases(beta)
    L = sum_truncation(float(R.max()))
    # ladder values J_{base+m}(R_j) and derivatives from neighbour orders
    lo = bessel_ladder_table(b_lo, R, L + 2)
    hi = bessel_ladder_table(b_hi, R, L + 2)
    # J_{base-1} by one downward step, stable for base in [0, 1]
    lo_m1 = (2.0 * b_lo / R) * lo[0] - lo[1]
    hi_m1 = (2.0 * b_hi / R) * hi[0] - hi[1]
    dlo = 0.5 * (np.vstack([lo_m1, lo[:-2]]) - lo[1:])
    dhi = 0.5 * (np.vstack([hi_m1, hi[:-2]]) - hi[1:])
    lo, hi = lo[:-1], hi[:-1]
    m = np.arange(L + 1, dtype=float)[:, None]
    # ell values carried by each ladder rung (depends on the sign of beta)
    if beta >= 0.0:
        ell_lo = n - m
        ell_hi = n + 1.0 + m[:-1]
    else:
        ell_lo = n + m
        ell_hi = n - 1.0 - m[:-1]
    hi = hi[:-1]
    dhi = dhi[:-1]
    a = 0.5 * ((lo * lo).sum(axis=0) + (hi * hi).sum(axis=0))
    b = 0.5 * ((lo * dlo).sum(axis=0) + (hi * dhi).sum(axis=0))
    c = (0.5 / R) * ((ell_lo * lo * lo).sum(axis=0) + (ell_hi * hi * hi).sum(axis=0))
    d = 0.5 * ((dlo * dlo).sum(axis=0) + (dhi * dhi).sum(axis=0))
    e = (0.5 / R) * ((ell_lo * lo * dlo).sum(axis=0) + (ell_hi * hi * dhi).sum(axis=0))
    f = (0.5 / R ** 2) * ((ell_lo ** 2 * lo * lo).sum(axis=0)
                          + (ell_hi ** 2 * hi * hi).sum(axis=0))
    return {"a": a, "b": b, "c": c, "d": d, "e": e, "f": f}


def moments_by_sum(flux, R: float, acc: Accuracy = DEFAULT_ACCURACY) -> MomentSet:
    """The six covariances from the truncated ell-sums."""
    g = moments_by_sum_grid(flux, np.array([float(R)]), acc)
    return MomentSet(float(R), *(float(g[k][0]) for k in "abcdef"))


# ---------------------------------------------------------------------------
# route 2: closed forms
# ---------------------------------------------------------------------------

def _closed_reduced(beta: float, R: float, acc: Accuracy) -> tuple[float, ...]:
    # closed forms for 0 < beta < 1/2 at zero integer part
    b_ = beta
    Ab = bessel_tail_sum(b_, R, acc)
    A1b = bessel_tail_sum(1.0 - b_, R, acc)
    Jb = bessel_j(b_, R)
    J1b = bessel_j(1.0 - b_, R)
    J2b = bessel_j(2.0 - b_, R)
    Jmb = bessel_j(-b_, R)
    Jbm1 = bessel_j(b_ - 1.0, R)
    Jb1 = bessel_j(b_ + 1.0, R)
    a = 0.5 * (Jb ** 2 + J1b ** 2 + Ab + A1b)
    b = 0.25 * (Jb * Jbm1 + Jmb * J1b)
    c = (b_ / (2.0 * R)) * (Ab + A1b) + 0.25 * (
        (R + 2.0 / R) * J1b ** 2 + (2.0 * b_ - 3.0) * J2b * J1b + R * J2b ** 2
        - R * Jb ** 2 - R * Jb1 ** 2 + (2.0 * b_ + 1.0) * Jb * Jb1)
    d = 0.25 * (Ab + A1b) + (
        (b_ / 8.0) * J1b ** 2 + ((2.0 - b_) / 8.0) * Jbm1 ** 2
        - (b_ * (1.0 - b_) / (4.0 * R)) * J1b * Jmb
        + ((1.0 + b_) / 8.0) * Jmb ** 2
        - ((1.0 - b_) * b_ / (4.0 * R)) * Jbm1 * Jb
        + ((1.0 - b_) / 8.0) * Jb ** 2)
    e = (1.0 / (8.0 * R)) * (
        R * J1b ** 2 - R * Jbm1 ** 2 + 2.0 * b_ * J1b * Jmb + R * Jmb ** 2
        + 2.0 * b_ * Jbm1 * Jb - R * Jb ** 2)
    f = (1.0 / (8.0 * R ** 2)) * (
        2.0 * (Ab + A1b) * (2.0 * b_ ** 2 + R ** 2)
        + (-4.0 * (2.0 + (b_ - 4.0) * b_) + (2.0 + 3.0 * b_) * R ** 2) * J1b ** 2
        + 2.0 * R ** 2 * J2b ** 2
        - 3.0 * b_ * R ** 2 * Jbm1 ** 2
        + 2.0 * (4.0 + b_ * (3.0 * b_ - 5.0)) * R * J1b * Jmb
        + (3.0 * b_ - 1.0) * R ** 2 * Jmb ** 2
        + 2.0 * b_ * (3.0 * b_ - 1.0) * R * Jbm1 * Jb
        + (4.0 * b_ ** 2 + (1.0 - 3.0 * b_) * R ** 2) * Jb ** 2)
    return a, b, c, d, e, f


def moments_closed(flux, R: float, acc: Accuracy = DEFAULT_ACCURACY) -> MomentSet:
    """The six covariances from the closed forms.

    The printed forms assume 0 < beta < 1/2 at zero integer flux; other
    fluxes are reached through the exact symmetries: beta -> -beta flips
    the signs of c and e only, and restoring the integer part n shifts

        c -> c + n a / R,   e -> e + n b / R,   f -> f + 2 n c / R + n^2 a / R^2.

    Within 1e-6 of beta = 0 or |beta| = 1/2 the forms sit on removable
    singular structure and the ladder sums are used instead.
    """
    flux = _as_flux(flux)
    R = float(R)
    if R <= 0.0:
        raise DomainError("moments require R > 0")
    n, beta = flux.n, flux.beta
    ab = abs(beta)
    if ab < _BETA_EDGE or ab > 0.5 - _BETA_EDGE:
        return moments_by_sum(flux, R, acc)
    a, b, c, d, e, f = _closed_reduced(ab, R, acc)
    if beta < 0.0:
        c, e = -c, -e
    if n != 0:
        f = f + 2.0 * n * c / R + n * n * a / (R * R)
        c = c + n * a / R
        e = e + n * b / R
    return MomentSet(R, a, b, c, d, e, f)

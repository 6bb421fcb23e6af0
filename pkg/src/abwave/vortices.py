"""Phase-vortex detection and estimators on sampled fields.

A vortex is a zero of the complex field; around each one the phase winds
by 2 pi times an integer charge, statistically always +-1.  Detection sums
wrapped phase differences around every grid plaquette: the total is
2 pi s with s in {-1, 0, +1} (|s| >= 2 in a cell means the grid is too
coarse and is rejected).  Subpixel positions come from intersecting the
bilinear zero sets of Re and Im inside the cell.

Phase differences are always wrapped edge-by-edge to (-pi, pi]; unwrapped
phase is meaningless near vortices.  Plaquettes touching the origin are
excluded: the flux point carries an integer charge of its own which is
accounted for in the winding bookkeeping, never in the vortex lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import DELTA_IRW
from .specfun import DomainError
from .synthesis import SampledField

__all__ = [
    "InterpolationError",
    "ResolutionError",
    "VortexSet",
    "RadialHistogram",
    "detect_vortices",
    "boundary_winding",
    "accumulate_radial",
    "pair_correlation",
    "PairCorrelation",
    "nearest_vortex_statistics",
    "NearestVortexStats",
    "vortices_to_csv",
]


class ResolutionError(RuntimeError):
    """A plaquette wound by |s| >= 2: grid spacing too coarse."""


class InterpolationError(RuntimeError):
    """A sampling circle keeps passing through near-zeros of the field."""


@dataclass
class VortexSet:
    """Detected vortices of one sample: positions, unit charges."""

    x: np.ndarray
    y: np.ndarray
    charge: np.ndarray
    sample_index: int

    def __post_init__(self):
        if not np.all(np.abs(self.charge) == 1):
            raise ResolutionError("vortex charges must be +-1")

    def __len__(self) -> int:
        return len(self.x)

    @property
    def R(self) -> np.ndarray:
        return np.hypot(self.x, self.y)

    @property
    def theta(self) -> np.ndarray:
        return np.arctan2(self.y, self.x)


def _wrap(d: np.ndarray) -> np.ndarray:
    # wrap to (-pi, pi]; the modulo form lands on [-pi, pi) so the single
    # boundary point is folded back explicitly
    w = (d + math.pi) % (2.0 * math.pi) - math.pi
    return np.where(w == -math.pi, math.pi, w)


def detect_vortices(field: SampledField) -> VortexSet:
    """Plaquette-winding detection with bilinear subpixel localization."""
    values = field.values
    if not np.all(np.isfinite(values)):
        raise DomainError("field contains non-finite values")
    grid = field.grid
    ax = grid.axis()
    h = grid.h
    ph = np.angle(values)
    d_right = _wrap(ph[:, 1:] - ph[:, :-1])
    d_up = _wrap(ph[1:, :] - ph[:-1, :])
    w = d_right[:-1, :] + d_up[:, 1:] - d_right[1:, :] - d_up[:, :-1]
    s = np.rint(w / (2.0 * math.pi)).astype(int)

    # drop the plaquettes whose corners touch the origin node (the flux
    # charge lives there, not a standard vortex)
    i0 = np.searchsorted(ax, 0.0)
    if abs(ax[i0]) < 0.5 * h:
        lo = max(i0 - 1, 0)
        s[lo:i0 + 1, lo:i0 + 1] = 0

    if np.any(np.abs(s) > 1):
        raise ResolutionError("plaquette with |winding| >= 2: refine the grid")
    iy, ix = np.nonzero(s)
    charges = s[iy, ix]

    xi = values.real
    eta = values.imag
    a0 = xi[iy, ix]
    a1 = xi[iy, ix + 1] - a0
    a2 = xi[iy + 1, ix] - a0
    a3 = xi[iy + 1, ix + 1] - a0 - a1 - a2
    b0 = eta[iy, ix]
    b1 = eta[iy, ix + 1] - b0
    b2 = eta[iy + 1, ix] - b0
    b3 = eta[iy + 1, ix + 1] - b0 - b1 - b2
    # xi = 0 and eta = 0 are hyperbolae in cell coordinates (u, v); their
    # intersection solves A u^2 + B u + C = 0, v from the xi branch
    A = b1 * a3 - b3 * a1
    B = b0 * a3 + b1 * a2 - b3 * a0 - b2 * a1
    C = b0 * a2 - b2 * a0
    u = np.full(len(iy), 0.5)
    v = np.full(len(iy), 0.5)
    disc = B * B - 4.0 * A * C
    ok = disc >= 0.0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    for sign in (1.0, -1.0):
        with np.errstate(divide="ignore", invalid="ignore"):
            uu = np.where(np.abs(A) > 1e-300,
                          (-B + sign * sq) / (2.0 * A),
                          np.where(np.abs(B) > 1e-300, -C / B, 0.5))
            vv = -(a0 + a1 * uu) / (a2 + a3 * uu)
        good = ok & np.isfinite(uu) & np.isfinite(vv) \
            & (uu >= -1e-9) & (uu <= 1.0 + 1e-9) \
            & (vv >= -1e-9) & (vv <= 1.0 + 1e-9)
        u = np.where(good, uu, u)
        v = np.where(good, vv, v)
    x = ax[ix] + np.clip(u, 0.0, 1.0) * h
    y = ax[iy] + np.clip(v, 0.0, 1.0) * h

    keep = np.hypot(x, y) >= h
    return VortexSet(x[keep], y[keep], charges[keep], field.sample_index)


def _bilinear(values: np.ndarray, ax: np.ndarray, h: float,
              xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    fx = (xs - ax[0]) / h
    fy = (ys - ax[0]) / h
    i0 = np.floor(fx).astype(int)
    j0 = np.floor(fy).astype(int)
    if np.any(i0 < 0) or np.any(j0 < 0) or np.any(i0 + 1 >= len(ax)) \
            or np.any(j0 + 1 >= len(ax)):
        raise DomainError("sampling circle does not fit inside the grid")
    tx = fx - i0
    ty = fy - j0
    return ((1 - tx) * (1 - ty) * values[j0, i0]
            + tx * (1 - ty) * values[j0, i0 + 1]
            + (1 - tx) * ty * values[j0 + 1, i0]
            + tx * ty * values[j0 + 1, i0 + 1])


def boundary_winding(field: SampledField, R_circle: float) -> int:
    """Integer phase winding around a centred circle, from >= max(64, 16 R)
    bilinear samples of Re and Im.  If the circle grazes a vortex (|Psi|
    below 1e-12 at a sample) the radius is nudged and retried."""
    if R_circle <= 0.0:
        raise DomainError("R_circle must be positive")
    grid = field.grid
    ax = grid.axis()
    M = max(64, int(math.ceil(16.0 * R_circle)))
    th = 2.0 * math.pi * np.arange(M) / M
    for attempt in range(8):
        r = R_circle * (1.0 + 0.05 * grid.h * attempt / max(R_circle, 1.0))
        xs = r * np.cos(th)
        ys = r * np.sin(th)
        vals = _bilinear(field.values, ax, grid.h, xs, ys)
        if np.min(np.abs(vals)) < 1e-12:
            continue
        ph = np.angle(vals)
        d = _wrap(np.diff(np.append(ph, ph[0])))
        total = d.sum() / (2.0 * math.pi)
        if abs(total - round(total)) > 0.25:
            continue
        return int(round(total))
    raise InterpolationError(
        f"circle R={R_circle} keeps passing through field zeros")


# ---------------------------------------------------------------------------
# radial accumulation
# ---------------------------------------------------------------------------

@dataclass
class RadialHistogram:
    """Signed vortex counts in concentric annuli, across an ensemble."""

    bin_edges: np.ndarray
    counts_plus: np.ndarray
    counts_minus: np.ndarray
    n_samples: int = 0

    @classmethod
    def with_edges(cls, bin_edges) -> "RadialHistogram":
        edges = np.asarray(bin_edges, dtype=float)
        if np.any(np.diff(edges) <= 0.0):
            raise DomainError("bin edges must increase")
        nb = len(edges) - 1
        return cls(edges, np.zeros(nb, dtype=np.int64), np.zeros(nb, dtype=np.int64))

    @property
    def annulus_areas(self) -> np.ndarray:
        return math.pi * (self.bin_edges[1:] ** 2 - self.bin_edges[:-1] ** 2)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def rho_hat(self) -> np.ndarray:
        """Signed density estimator (counts+ - counts-) / (area n_samples)."""
        return (self.counts_plus - self.counts_minus) \
            / (self.annulus_areas * max(self.n_samples, 1))

    def delta_hat(self) -> np.ndarray:
        """Unsigned density estimator (counts+ + counts-) / (area n_samples)."""
        return (self.counts_plus + self.counts_minus) \
            / (self.annulus_areas * max(self.n_samples, 1))


def accumulate_radial(hist: RadialHistogram, vs: VortexSet) -> RadialHistogram:
    """Fold one sample's vortices into the histogram (in place, returned)."""
    if len(vs):
        r = vs.R
        pos = vs.charge > 0
        hist.counts_plus += np.histogram(r[pos], bins=hist.bin_edges)[0]
        hist.counts_minus += np.histogram(r[~pos], bins=hist.bin_edges)[0]
    hist.n_samples += 1
    return hist


# ---------------------------------------------------------------------------
# pair correlation (isotropic ensemble)
# ---------------------------------------------------------------------------

@dataclass
class PairCorrelation:
    """Distance-binned pair statistics normalized by Delta_irw^2."""

    r: np.ndarray
    g: np.ndarray
    g_se: np.ndarray
    g_s: np.ndarray
    g_s_se: np.ndarray
    n_samples: int


def pair_correlation(vortex_sets, domain_radius: float,
                     r_max: float = 10.0, bin_width: float = 0.25) -> PairCorrelation:
    """Number and charge pair correlations g, g_s from detected vortices.

    Reference vortices are restricted to the subdisk of radius
    domain_radius - r_max so every annulus lies inside the data window
    (edge correction without periodic assumptions); partners are taken
    from the full square.  Normalization uses the theoretical Delta_irw.
    """
    if r_max >= domain_radius:
        raise DomainError("r_max must be smaller than domain_radius")
    ref_radius = domain_radius - r_max
    edges = np.arange(0.0, r_max + bin_width / 2, bin_width)
    nb = len(edges) - 1
    area = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)
    ref_area = math.pi * ref_radius ** 2
    per_sample_g = []
    per_sample_gs = []
    for vs in vortex_sets:
        gk = np.zeros(nb)
        gsk = np.zeros(nb)
        if len(vs) >= 2:
            r = vs.R
            is_ref = r <= ref_radius
            xr, yr, qr = vs.x[is_ref], vs.y[is_ref], vs.charge[is_ref]
            if len(xr):
                dx = vs.x[None, :] - xr[:, None]
                dy = vs.y[None, :] - yr[:, None]
                dist = np.hypot(dx, dy)
                qq = np.outer(qr, vs.charge).astype(float)
                self_pair = dist < 1e-12
                dist[self_pair] = np.inf
                flat = dist.ravel()
                sel = flat < r_max
                gk = np.histogram(flat[sel], bins=edges)[0].astype(float)
                gsk = np.histogram(flat[sel], bins=edges,
                                   weights=qq.ravel()[sel])[0]
        # one sample's estimate of g on each annulus
        norm = ref_area * DELTA_IRW * DELTA_IRW * area
        per_sample_g.append(gk / norm)
        per_sample_gs.append(gsk / norm)
    G = np.array(per_sample_g)
    GS = np.array(per_sample_gs)
    ns = len(per_sample_g)
    if ns < 2:
        raise DomainError("pair_correlation needs at least two samples")
    centers = 0.5 * (edges[1:] + edges[:-1])
    return PairCorrelation(
        r=centers,
        g=G.mean(axis=0), g_se=G.std(axis=0, ddof=1) / math.sqrt(ns),
        g_s=GS.mean(axis=0), g_s_se=GS.std(axis=0, ddof=1) / math.sqrt(ns),
        n_samples=ns)


# ---------------------------------------------------------------------------
# nearest-vortex statistics
# ---------------------------------------------------------------------------

@dataclass
class NearestVortexStats:
    """Per-sample nearest detected vortex: distance and charge."""

    r_nv: np.ndarray
    charge: np.ndarray
    n_samples: int
    n_empty: int

    def positive_fraction(self, r_max: float = math.inf) -> float:
        sel = self.r_nv <= r_max
        if not sel.any():
            raise DomainError("no nearest vortices below r_max")
        return float(np.mean(self.charge[sel] > 0))

    def conditional_mean(self, delta: float, r_min: float = 0.0) -> float:
        sel = (self.r_nv < delta) & (self.r_nv >= r_min)
        if not sel.any():
            raise DomainError("no nearest vortices inside the window")
        return float(np.mean(self.r_nv[sel]))

    def window_fraction(self, delta: float) -> float:
        return float(np.mean(self.r_nv < delta))


def nearest_vortex_statistics(vortex_sets) -> NearestVortexStats:
    """Distance and charge of the vortex nearest the flux, per sample.
    Samples with no detected vortex at all are counted separately."""
    r_list = []
    q_list = []
    empty = 0
    total = 0
    for vs in vortex_sets:
        total += 1
        if len(vs) == 0:
            empty += 1
            continue
        r = vs.R
        i = int(np.argmin(r))
        r_list.append(float(r[i]))
        q_list.append(int(vs.charge[i]))
    return NearestVortexStats(np.array(r_list), np.array(q_list), total, empty)


def vortices_to_csv(vortex_sets, path) -> None:
    """CSV export with fixed column order sample,x,y,charge."""
    with open(path, "w") as fh:
        fh.write("sample,x,y,charge\n")
        for vs in vortex_sets:
            for x, y, q in zip(vs.x, vs.y, vs.charge):
                fh.write(f"{vs.sample_index},{x:.17g},{y:.17g},{int(q)}\n")

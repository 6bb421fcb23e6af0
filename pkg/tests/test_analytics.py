"""Derived quantities against their independent oracles: finite
differences of the covariances, adaptive quadrature, change-of-variables
push-forwards, and the printed limits."""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import j0, j1

from abwave import analytics
from abwave.analytics import (
    DELTA_IRW,
    MEAN_PHASE_GRADIENT_RADIAL,
    RadialCurve,
    asymptotic_large_R,
    charge_density,
    excess_curve,
    expansion_small_R,
    isotropic_charge_correlation,
    isotropic_charge_correlation_asymptote,
    isotropic_like_unlike,
    isotropic_number_correlation_asymptote,
    mean_excess,
    mean_phase_gradient_azimuthal,
    nearest_vortex_cdf,
    nearest_vortex_conditional_mean,
    nearest_vortex_pdf,
    phase_integral,
    signed_densities,
    total_charge,
    vortex_density,
    vortex_excess,
)
from abwave.moments import FluxParameter
from abwave.specfun import DomainError, gamma

PI = math.pi


# ---------------------------------------------------------------------------
# densities and exact identities
# ---------------------------------------------------------------------------

def test_zero_flux_densities():
    for R in (0.5, 3.0, 20.0):
        assert abs(charge_density(0.0, R)) <= 1e-12
        assert abs(vortex_density(0.0, R) - DELTA_IRW) <= 1e-12


def test_half_flux_identities():
    for R in np.linspace(0.5, 30.0, 60):
        assert abs(charge_density(0.5, float(R))) <= 1e-12
        ca = mean_phase_gradient_azimuthal(0.5, float(R))
        assert abs(ca - 1.0 / (2.0 * R)) <= 1e-10
    assert MEAN_PHASE_GRADIENT_RADIAL == 0.0


def test_parity_and_periodicity():
    for beta in (0.05, 0.25, 0.49):
        for R in (0.3, 2.0, 11.0):
            assert abs(charge_density(beta, R) + charge_density(-beta, R)) <= 1e-12
            assert abs(vortex_density(beta, R) - vortex_density(-beta, R)) <= 1e-12
            # densities depend only on the fractional part
            assert abs(charge_density(beta, R) - charge_density(beta + 1.0, R)) <= 1e-12
            assert abs(vortex_density(beta, R) - vortex_density(beta + 2.0, R)) <= 1e-12


def test_pointwise_bound_and_signed_densities():
    for beta in (0.05, 0.25, 0.375, 0.49):
        for R in np.linspace(0.2, 25.0, 40):
            rho = charge_density(beta, float(R))
            delta = vortex_density(beta, float(R))
            assert abs(rho) <= delta + 1e-14
    dp, dm = signed_densities(0.0, 4.0)
    assert abs(dp - 0.5) <= 1e-12 and abs(dm - 0.5) <= 1e-12


def test_signed_densities_small_R_split():
    # Delta+ diverges as R^(-4 beta), Delta- vanishes as R^(4 beta)
    beta = 0.375
    dp1, dm1 = signed_densities(beta, 1e-3)
    dp2, dm2 = signed_densities(beta, 1e-4)
    assert dp2 / dp1 == pytest.approx(10.0 ** (4 * beta), rel=0.05)
    assert dm2 / dm1 == pytest.approx(10.0 ** (-4 * beta), rel=0.05)


def test_signed_densities_approach_half():
    dp, dm = signed_densities(0.375, 100.0)
    assert abs(dp - 0.5) <= 0.02
    assert abs(dm - 0.5) <= 0.02


def test_curl_consistency():
    # rho = (2 pi R)^-1 d/dR [R c/a], checked by central differences
    for beta in (0.25, 0.49, -0.375):
        for R in (0.8, 3.0, 12.0):
            h = 1e-5 * R
            up = (R + h) * mean_phase_gradient_azimuthal(beta, R + h)
            dn = (R - h) * mean_phase_gradient_azimuthal(beta, R - h)
            fd = (up - dn) / (2.0 * h) / (2.0 * PI * R)
            rho = charge_density(beta, R)
            assert abs(fd - rho) <= 1e-6 * max(abs(rho), 1e-3)


def test_mc_oracle_mean_gradient_magnitude():
    # the azimuthal gradient is c/a; regression value frozen from the
    # ladder sums after cross-validation against the closed forms
    val = mean_phase_gradient_azimuthal(0.25, 4.0)
    assert val == pytest.approx(0.062269344412919196, rel=1e-12)


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------

def test_large_R_asymptotics_envelope():
    for beta in (0.05, 0.25, 0.49):
        amp_rho = (1 - 2 * beta) * math.sin(beta * PI) / (2 * PI ** 2)
        amp_delta = math.sin(beta * PI) / (2 * PI ** 2)
        for R in np.linspace(6 * PI, 20 * PI, 200):
            ra, da = asymptotic_large_R(beta, float(R))
            assert abs(charge_density(beta, float(R)) - ra) <= 0.3 * amp_rho / R ** 2
            assert abs(vortex_density(beta, float(R)) - da) <= 0.3 * amp_delta / R


def test_asymptotic_zero_and_half_flux():
    ra, da = asymptotic_large_R(0.0, 30.0)
    assert ra == 0.0 and abs(da - DELTA_IRW) <= 1e-15
    ra, _ = asymptotic_large_R(0.5, 30.0)
    assert ra == 0.0
    # half flux has the largest Delta fluctuation amplitude
    _, da1 = asymptotic_large_R(0.5, 7.0 * PI)
    _, da2 = asymptotic_large_R(0.25, 7.0 * PI)
    assert abs(da1 - DELTA_IRW) > abs(da2 - DELTA_IRW)


def test_asymptotic_accuracy_at_R30():
    beta = 0.25
    _, da = asymptotic_large_R(beta, 30.0)
    exact = vortex_density(beta, 30.0)
    assert abs(da - exact) <= 0.02 * exact


def test_asymptotic_domain():
    with pytest.raises(DomainError):
        asymptotic_large_R(0.25, 5.0)


def _refine_max(f, lo, hi, n=400):
    xs = np.linspace(lo, hi, n)
    ys = np.array([f(float(x)) for x in xs])
    i = int(np.argmax(ys))
    i = min(max(i, 1), n - 2)
    # parabolic refinement
    a, b, c = ys[i - 1], ys[i], ys[i + 1]
    denom = a - 2 * b + c
    shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    return xs[i] + shift * (xs[1] - xs[0])


def test_extrema_phase_offset():
    # Delta peaks where cos(2R) = 1, rho a quarter period later
    beta = 0.25
    lo = 8 * PI
    r_delta = _refine_max(lambda r: vortex_density(beta, r), lo, lo + PI)
    r_rho = _refine_max(lambda r: charge_density(beta, r), lo, lo + PI)
    assert abs((r_rho - r_delta) - PI / 4) <= 0.05


def test_small_R_expansion_shared_by_rho_and_delta():
    # two-term expansion within 1% at R = 1e-3 for beta = 0.25, 0.375; the
    # constant-order remainder dominates at beta = 0.1 (see the module note)
    R = 1e-3
    for beta in (0.25, 0.375):
        e = expansion_small_R(beta, R)
        assert abs(charge_density(beta, R) / e - 1.0) <= 0.01
        assert abs(vortex_density(beta, R) / e - 1.0) <= 0.01


def test_small_R_expansion_coefficient_sign_and_half_limit():
    # first coefficient positive for 0 < beta < 1/2; both vanish at 1/2
    from abwave.analytics import _smallR_coeffs

    for beta in (0.05, 0.25, 0.45):
        c1, c2 = _smallR_coeffs(beta)
        assert c1 > 0.0
    c1, c2 = _smallR_coeffs(0.4999999)
    assert abs(c1) < 1e-6 and abs(c2) < 1e-6


def test_small_R_expansion_second_coefficient_is_single_power():
    # the residual after the two-term form must scale like the n = 2 term
    # R^(4-12b); with a squared (1-2b) second coefficient it would scale
    # like the uncancelled R^(2-8b) remainder instead.  This pins the
    # single power of (1-2b).
    beta = 0.375
    r1, r2 = 1e-3, 1e-4
    resid = [charge_density(beta, r) - expansion_small_R(beta, r)
             for r in (r1, r2)]
    slope = math.log(abs(resid[1] / resid[0])) / math.log(r2 / r1)
    assert slope == pytest.approx(4.0 - 12.0 * beta, abs=0.1)


def test_expansion_domain():
    with pytest.raises(DomainError):
        expansion_small_R(0.0, 1e-3)
    with pytest.raises(DomainError):
        expansion_small_R(0.5, 1e-3)


# ---------------------------------------------------------------------------
# phase integral and total charge
# ---------------------------------------------------------------------------

def test_phase_integral_integer_and_half():
    for R in (0.5, 5.0, 40.0):
        assert abs(phase_integral(1.0, R) - 1.0) <= 1e-11
        assert abs(phase_integral(1.5, R) - 1.5) <= 1e-11
        assert abs(phase_integral(-2.0, R) + 2.0) <= 1e-11


def test_phase_integral_tends_to_alpha():
    for alpha in (0.25, 0.5, 0.6, 1.0, 1.35):
        assert abs(phase_integral(alpha, 50.0) - alpha) <= 0.01


def test_phase_integral_small_R_limit():
    # I(R -> 0) = n with the fractional part fading as R^(2-4|beta|);
    # alpha = 0.6 has n = 1 and |beta| = 0.4, so convergence is slow
    devs = [abs(phase_integral(0.6, r) - 1.0) for r in (1e-2, 1e-4, 1e-6)]
    assert devs[2] < devs[1] < devs[0]
    assert devs[2] <= 0.01


def test_total_charge_values():
    assert abs(total_charge(0.0, 40.0 * PI)) <= 1e-11
    for beta in (0.1, 0.25, 0.49):
        assert abs(total_charge(beta, 40.0 * PI) - beta) <= 0.005


def test_total_charge_two_paths_agree():
    for beta in (0.1, 0.25, 0.49):
        exact = total_charge(beta, 20.0 * PI)
        quad = total_charge(beta, 20.0 * PI, method="quadrature")
        assert abs(exact - quad) <= 1e-6
    # antisymmetry carries to the quadrature path
    assert abs(total_charge(-0.25, 20.0 * PI, "quadrature")
               + total_charge(0.25, 20.0 * PI, "quadrature")) <= 2e-6


def test_small_R_circulation_exponent():
    # R c/a ~ const R^(2-4 beta): log-log slope on [1e-4, 1e-2]
    beta = 0.3
    rs = np.array([1e-4, 1e-3, 1e-2])
    vals = np.array([r * mean_phase_gradient_azimuthal(beta, float(r))
                     for r in rs])
    slope = np.polyfit(np.log(rs), np.log(vals), 1)[0]
    assert abs(slope - (2.0 - 4.0 * beta)) <= 0.02


# ---------------------------------------------------------------------------
# vortex excess
# ---------------------------------------------------------------------------

def test_excess_zero_flux():
    assert vortex_excess(0.0, 3.0) == 0.0
    assert mean_excess(0.0) == 0.0


def test_excess_oscillation_amplitude():
    # N(R) ~ Nbar + sin(b pi) sin(2R) / (2 pi) for R beyond ~pi/2
    beta = 0.375
    Rs = np.linspace(2 * PI, 4 * PI, 81)
    curve = excess_curve(beta, Rs)
    nbar = mean_excess(beta)
    osc = curve.values - nbar
    amp = 0.5 * (osc.max() - osc.min())
    assert abs(amp - math.sin(beta * PI) / (2 * PI)) <= 0.05 * math.sin(beta * PI) / (2 * PI)


def test_excess_mean_monotone_and_window():
    betas = [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.49]
    nbars = [mean_excess(b) for b in betas]
    for lo, hi in zip(nbars, nbars[1:]):
        assert hi >= lo - 0.02
    # Nbar is well approximated by integrating only to R ~ pi/2
    assert abs(mean_excess(0.45) - vortex_excess(0.45, PI / 2)) <= 0.1


def test_excess_head_survives_brute_force_comparison():
    # at moderate beta a tiny-delta quadrature can still reach the limit;
    # the closed-form head must agree with it
    beta = 0.25
    p = 2.0 - 4.0 * beta

    def integrand(u):
        r = u ** (1.0 / p)
        return 2 * PI * (vortex_density(beta, r) - DELTA_IRW) \
            * u ** (2.0 / p - 1.0) / p

    brute = integrate.quad(integrand, (1e-9) ** p, 1.0, limit=600)[0]
    brute += integrate.quad(
        lambda r: 2 * PI * r * (vortex_density(beta, r) - DELTA_IRW),
        1.0, 2.0, limit=400)[0]
    assert abs(vortex_excess(beta, 2.0) - brute) <= 1e-6


def test_excess_curve_matches_pointwise():
    beta = 0.45
    Rs = np.array([0.5, 1.5, 4.0])
    curve = excess_curve(beta, Rs)
    for R, v in zip(Rs, curve.values):
        assert abs(vortex_excess(beta, float(R)) - v) <= 1e-7


# ---------------------------------------------------------------------------
# nearest vortex
# ---------------------------------------------------------------------------

def test_nv_pdf_normalization():
    for beta in (0.3, 0.4, 0.45, 0.49):
        p = 2.0 - 4.0 * beta
        # substitution u = (R/2)^(2-4b) maps the density to a rational form
        g1 = gamma(1 + beta) ** 2
        g2 = gamma(2 - beta) ** 2
        val = integrate.quad(lambda u: g1 * g2 / (g2 + g1 * u) ** 2,
                             0.0, np.inf, limit=200)[0]
        assert abs(val - 1.0) <= 1e-8
        # the CDF reaches 1, but only on the heavy-tailed u-scale: the
        # radius carrying u = 1e8 grows like 2 u^(1/(2-4 beta))
        R_far = 2.0 * (1e8) ** (1.0 / p)
        assert abs(nearest_vortex_cdf(beta, R_far) - 1.0) <= 1e-6


def test_nv_pdf_transform_oracle():
    # P_beta must be the push-forward of P(gamma) = 2 gamma/(1+gamma^2)^2
    # through gamma = (G1/G2)^(1/2-ish) ... (R/2)^(1-2 beta) ratio relation
    beta = 0.35
    g1 = gamma(1 + beta)
    g2 = gamma(2 - beta)
    for R in np.linspace(0.05, 3.0, 20):
        gam = (g1 / g2) * (R / 2.0) ** (1.0 - 2.0 * beta)
        pg = 2.0 * gam / (1.0 + gam * gam) ** 2
        dgam_dR = (g1 / g2) * (1.0 - 2.0 * beta) / 2.0 \
            * (R / 2.0) ** (-2.0 * beta)
        ref = pg * dgam_dR
        assert nearest_vortex_pdf(beta, float(R)) == pytest.approx(ref, rel=1e-12)


def test_nv_mean_divergence_for_large_beta():
    # the unconditioned mean diverges for beta > 1/4: truncated means grow
    beta = 0.3
    means = []
    for T in (10.0, 100.0, 1000.0):
        val = integrate.quad(lambda r: r * nearest_vortex_pdf(beta, r),
                             0.0, T, limit=400)[0]
        means.append(val)
    assert means[1] > 2.0 * means[0]
    assert means[2] > 2.0 * means[1]


def test_nv_conditional_mean_quadrature_oracle():
    for beta, delta in ((0.45, 0.5), (0.49, 1.0)):
        p = 2.0 - 4.0 * beta
        g1 = gamma(1 + beta) ** 2
        g2 = gamma(2 - beta) ** 2
        u_d = (delta / 2.0) ** p
        num = integrate.quad(
            lambda u: 2.0 * u ** (1.0 / p) * g1 * g2 / (g2 + g1 * u) ** 2,
            0.0, u_d, limit=400)[0]
        den = g1 * u_d / (g2 + g1 * u_d)
        ref = num / den
        assert abs(nearest_vortex_conditional_mean(beta, delta) - ref) <= 1e-8


def test_nv_conditional_mean_small_eps_law():
    eps = 0.01
    val = nearest_vortex_conditional_mean(0.5 - eps, 1.0)
    assert abs(val / (2.0 * eps) - 1.0) <= 0.05


def test_nv_conditional_mean_monotone_in_delta():
    beta = 0.4
    vals = [nearest_vortex_conditional_mean(beta, d)
            for d in np.linspace(0.1, 3.0, 12)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_nv_domain():
    with pytest.raises(DomainError):
        nearest_vortex_pdf(0.6, 1.0)
    with pytest.raises(DomainError):
        nearest_vortex_conditional_mean(0.3, -1.0)


# ---------------------------------------------------------------------------
# isotropic correlations
# ---------------------------------------------------------------------------

def test_gs_finite_difference_oracle():
    h = 1e-6

    def bracket(r):
        return j1(r) ** 2 / (1.0 - j0(r) ** 2)

    ref = 4.0 / 2.0 * (bracket(2.0 + h) - bracket(2.0 - h)) / (2.0 * h)
    assert abs(isotropic_charge_correlation(2.0) - ref) <= 1e-6


def test_gs_origin_limit():
    # finite and nonzero at the origin (-1/4)
    for r in (1e-6, 1e-4, 1e-2):
        v = isotropic_charge_correlation(r)
        assert abs(v + 0.25) <= 1e-3


def test_gs_large_R_asymptote():
    R = 10.0 * PI
    v = isotropic_charge_correlation(R)
    a = isotropic_charge_correlation_asymptote(R)
    assert abs(v - a) <= 0.10 * abs(a)


def test_gs_screening_integral():
    # Delta_irw * integral of 2 pi R g_s = -1 (topological screening);
    # integrate per half-period segments to keep quad honest
    T = 50.0
    edges = np.concatenate([[1e-6], np.arange(0.5, T, 0.5), [T]])
    val = sum(integrate.quad(
        lambda r: 2 * PI * r * isotropic_charge_correlation(r), a, b,
        limit=200)[0] for a, b in zip(edges[:-1], edges[1:]))
    # the remainder beyond T is 8 pi (bracket(inf) - bracket(T)) = -8 pi bracket(T)
    tail = -8.0 * PI * j1(T) ** 2 / (1.0 - j0(T) ** 2)
    assert abs(DELTA_IRW * (val + tail) + 1.0) <= 1e-4


def test_like_unlike_combinations():
    gp, gm = isotropic_like_unlike(5.0, 1.0)
    gs = isotropic_charge_correlation(5.0)
    assert gp == pytest.approx(0.5 * (1.0 + gs))
    assert gm == pytest.approx(0.5 * (1.0 - gs))
    # uncorrelated limit: g = 1, g_s -> 0 at large R
    gp, gm = isotropic_like_unlike(200.0, 1.0)
    assert abs(gp - 0.5) <= 1e-3 and abs(gm - 0.5) <= 1e-3


def test_like_charges_repel_at_origin():
    # g(0) + g_s(0) = O(R^2): with the small-R number correlation equal to
    # -g_s(0) = 1/4, g_+ -> 0
    gp, _ = isotropic_like_unlike(1e-3, 0.25)
    assert abs(gp) <= 1e-3


def test_g_asymptote_shape():
    R = 9.0
    assert isotropic_number_correlation_asymptote(R) == pytest.approx(
        1.0 + 4.0 * math.sin(2 * R) / (PI * R))


# ---------------------------------------------------------------------------
# RadialCurve plumbing
# ---------------------------------------------------------------------------

def test_radial_curve_validation():
    with pytest.raises(DomainError):
        RadialCurve("nope", 0.1, np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    with pytest.raises(DomainError):
        RadialCurve("rho", 0.1, np.array([2.0, 1.0]), np.array([0.0, 0.0]))
    with pytest.raises(DomainError):
        RadialCurve("delta", 0.1, np.array([1.0, 2.0]), np.array([-1.0, 0.0]))
    c = RadialCurve("rho", 0.1, np.array([1.0, 2.0]), np.array([0.5, 0.25]))
    assert c.samples() == [(1.0, 0.5), (2.0, 0.25)]

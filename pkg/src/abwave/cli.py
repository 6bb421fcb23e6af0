"""Command-line driver.

Subcommands:

    curves          analytic rho, Delta, Delta+- tables (CSV, optional SVG)
    moments         the six covariances a..f on a radial grid
    mc density|phase-integral|gradient|pair-correlation|nearest-vortex
                    seeded Monte Carlo experiments with PASS/FAIL summaries
    field           dump one sampled (or deterministic) field + phase map
    nearest-vortex  P_beta table and conditional mean <R_nv>_delta
    excess          N(R, beta) curve and the steady mean N-bar(beta)

Exit codes: 0 success, 1 invalid arguments or domain error, 2 an
experiment reported FAIL.  All outputs are deterministic given the flags;
numbers are printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import analytics
from .analytics import DELTA_IRW
from .mc import (
    run_density_experiment,
    run_mean_gradient_experiment,
    run_nearest_vortex_experiment,
    run_pair_correlation_experiment,
    run_phase_integral_experiment,
)
from .moments import FluxParameter, moments_by_sum
from .plotting import svg_line_chart, write_phase_map_ppm
from .specfun import DomainError
from .synthesis import (
    EnsembleSpec,
    Grid,
    deterministic_ab_wave,
    save_field,
    synthesize_ab_field,
)

CSV_TAG = "# abwave-csv v1"

_FIG_BETAS = [0.25, -0.25, 0.49, 0.05, 0.0]


class _Parser(argparse.ArgumentParser):
    # validation failures must exit 1 (argparse defaults to 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_csv(path, tag: str, header: list[str], columns) -> None:
    with open(path, "w") as fh:
        fh.write(f"{CSV_TAG} {tag}\n")
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _flux_from(args) -> FluxParameter:
    if getattr(args, "alpha", None) is not None:
        return FluxParameter(args.alpha)
    if getattr(args, "beta", None) is not None:
        return FluxParameter.from_beta(args.beta)
    raise DomainError("one of --alpha / --beta is required")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_curves(args) -> int:
    out = _outdir(args)
    betas = args.beta if args.beta else _FIG_BETAS
    R = np.linspace(args.rmax / args.points, args.rmax, args.points)
    header = ["R"]
    cols = [R]
    series_rho = []
    series_delta = []
    for b in betas:
        flux = FluxParameter.from_beta(b)
        rho = analytics.charge_density(flux, R) / DELTA_IRW
        delta = analytics.vortex_density(flux, R) / DELTA_IRW
        dp, dm = analytics.signed_densities(flux, R)
        header += [f"rho_over_irw_b{b:g}", f"delta_over_irw_b{b:g}",
                   f"delta_plus_b{b:g}", f"delta_minus_b{b:g}"]
        cols += [rho, delta, dp, dm]
        series_rho.append((f"beta={b:g}", R, rho))
        series_delta.append((f"beta={b:g}", R, delta))
    path = os.path.join(out, "curves.csv")
    _write_csv(path, "curves", header, cols)
    print(path)
    if args.format == "svg":
        p1 = os.path.join(out, "curves_rho.svg")
        p2 = os.path.join(out, "curves_delta.svg")
        svg_line_chart(p1, series_rho, "charge density / Delta_irw", "R")
        svg_line_chart(p2, series_delta, "vortex density / Delta_irw", "R")
        print(p1)
        print(p2)
    return 0


def cmd_moments(args) -> int:
    out = _outdir(args)
    flux = _flux_from(args)
    R = np.linspace(args.rmax / args.points, args.rmax, args.points)
    from .moments import moments_by_sum_grid

    g = moments_by_sum_grid(flux, R)
    path = os.path.join(out, "moments.csv")
    _write_csv(path, f"moments alpha={flux.alpha:g}", ["R", *"abcdef"],
               [R] + [g[k] for k in "abcdef"])
    print(path)
    return 0


def _spec_from(args, flux: FluxParameter) -> EnsembleSpec:
    return EnsembleSpec(flux, args.seed, args.samples,
                        domain_radius=args.rmax, grid_h=args.grid_h)


def cmd_mc(args) -> int:
    out = _outdir(args)
    failed = False
    if args.experiment == "density":
        spec = _spec_from(args, _flux_from(args))
        rep_rho, rep_delta = run_density_experiment(spec)
        for rep in (rep_rho, rep_delta):
            path = os.path.join(out, f"mc_density_{rep.quantity}.csv")
            rep.to_csv(path)
            print(path)
            print(rep.summary_line())
            failed |= not rep.passed
    elif args.experiment == "phase-integral":
        spec = _spec_from(args, _flux_from(args))
        radii = np.arange(1.0, spec.domain_radius - 4.0 * spec.grid_h, 1.0)
        rep = run_phase_integral_experiment(spec, radii)
        path = os.path.join(out, "mc_phase_integral.csv")
        rep.to_csv(path)
        print(path)
        print(rep.summary_line())
        failed |= not rep.passed
    elif args.experiment == "gradient":
        spec = _spec_from(args, _flux_from(args))
        radii = np.arange(1.0, spec.domain_radius - 4.0 * spec.grid_h, 2.0)
        for rep in run_mean_gradient_experiment(spec, radii):
            path = os.path.join(out, f"mc_{rep.quantity}.csv")
            rep.to_csv(path)
            print(path)
            print(rep.summary_line())
            failed |= not rep.passed
    elif args.experiment == "pair-correlation":
        spec = _spec_from(args, FluxParameter(0.0))
        r_max = min(10.0, spec.domain_radius - 2.0)
        rep, pc = run_pair_correlation_experiment(spec, r_max=r_max)
        path = os.path.join(out, "mc_g_s.csv")
        rep.to_csv(path)
        print(path)
        gpath = os.path.join(out, "mc_g.csv")
        _write_csv(gpath, "pair-correlation g", ["R", "g", "g_se"],
                   [pc.r, pc.g, pc.g_se])
        print(gpath)
        print(rep.summary_line())
        failed |= not rep.passed
    else:  # nearest-vortex
        flux = _flux_from(args)
        spec = _spec_from(args, flux)
        stats = run_nearest_vortex_experiment(spec)
        path = os.path.join(out, "mc_nearest_vortex.csv")
        _write_csv(path, f"nearest-vortex beta={flux.beta:g}",
                   ["r_nv", "charge"],
                   [stats.r_nv, stats.charge.astype(float)])
        print(path)
        frac = stats.positive_fraction()
        print(f"positive-fraction {frac:.4f} n {stats.n_samples} "
              f"empty {stats.n_empty}")
    return 2 if failed else 0


def cmd_field(args) -> int:
    out = _outdir(args)
    flux = _flux_from(args)
    grid = Grid(args.rmax, args.grid_h)
    if args.mode == "deterministic":
        X, Y = grid.meshes()
        R = np.hypot(X, Y)
        TH = np.arctan2(Y, X)
        values = deterministic_ab_wave(flux, args.theta0, R.ravel(), TH.ravel())
        values = values.reshape(grid.n_side, grid.n_side)
        from .synthesis import SampledField

        field = SampledField(grid, flux, -1, args.seed, values)
    else:
        spec = EnsembleSpec(flux, args.seed, max(args.index + 1, 1),
                            domain_radius=args.rmax, grid_h=args.grid_h)
        field = synthesize_ab_field(spec, args.index, grid)
    dump = os.path.join(out, "field.txt")
    save_field(field, dump)
    print(dump)
    ppm = os.path.join(out, "field_phase.ppm")
    write_phase_map_ppm(ppm, field.values, grid.h,
                        flux_marker=abs(flux.beta) > 1e-12)
    print(ppm)
    return 0


def cmd_nearest_vortex(args) -> int:
    out = _outdir(args)
    flux = _flux_from(args)
    beta = abs(flux.beta)
    R = np.linspace(args.rmax / args.points, args.rmax, args.points)
    pdf = analytics.nearest_vortex_pdf(beta, R)
    path = os.path.join(out, "nearest_vortex_pdf.csv")
    _write_csv(path, f"nearest-vortex-pdf beta={beta:g}",
               ["r_nv", "pdf"], [R, pdf])
    print(path)
    deltas = np.linspace(0.1, 2.0, 20)
    means = np.array([analytics.nearest_vortex_conditional_mean(beta, d)
                      for d in deltas])
    path2 = os.path.join(out, "nearest_vortex_conditional_mean.csv")
    _write_csv(path2, f"nearest-vortex-mean beta={beta:g}",
               ["delta", "mean_r_nv"], [deltas, means])
    print(path2)
    return 0


def cmd_excess(args) -> int:
    out = _outdir(args)
    flux = _flux_from(args)
    beta = abs(flux.beta)
    R = np.linspace(0.05, args.rmax, args.points)
    curve = analytics.excess_curve(flux, R)
    path = os.path.join(out, "excess_curve.csv")
    _write_csv(path, f"excess beta={flux.beta:g}", ["R", "N"],
               [curve.R, curve.values])
    print(path)
    betas = np.arange(0.05, 0.495, 0.05)
    nbars = np.array([analytics.mean_excess(b) for b in betas])
    path2 = os.path.join(out, "excess_mean.csv")
    _write_csv(path2, "excess-mean", ["beta", "nbar"], [betas, nbars])
    print(path2)
    if args.format == "svg":
        p = os.path.join(out, "excess.svg")
        svg_line_chart(p, [(f"beta={flux.beta:g}", curve.R, curve.values)],
                       "vortex excess N(R)", "R", "N")
        print(p)
    return 0


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_flux_args(p, need: bool = True):
    g = p.add_mutually_exclusive_group(required=need)
    g.add_argument("--alpha", type=float, help="full flux (integer part kept)")
    g.add_argument("--beta", type=float, help="fractional flux in (-1/2, 1/2]")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="abwave", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(q, rmax=12.0, points=300):
        q.add_argument("--rmax", type=float, default=rmax)
        q.add_argument("--points", type=int, default=points)
        q.add_argument("--out", type=str, default=".")
        q.add_argument("--format", choices=["csv", "svg"], default="csv")

    q = sub.add_parser("curves", help="analytic density curves")
    q.add_argument("--beta", type=float, action="append",
                   help="repeatable; defaults to the standard set")
    common(q, rmax=25.0, points=500)
    q.set_defaults(fn=cmd_curves)

    q = sub.add_parser("moments", help="covariances a..f on a radial grid")
    _add_flux_args(q)
    common(q, rmax=30.0, points=300)
    q.set_defaults(fn=cmd_moments)

    q = sub.add_parser("mc", help="Monte Carlo experiments")
    q.add_argument("experiment", choices=["density", "phase-integral",
                                          "gradient", "pair-correlation",
                                          "nearest-vortex"])
    _add_flux_args(q, need=False)
    q.add_argument("--samples", type=int, default=2000)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--grid-h", type=float, default=0.2, dest="grid_h")
    common(q)
    q.set_defaults(fn=cmd_mc)

    q = sub.add_parser("field", help="dump one field + phase map")
    _add_flux_args(q)
    q.add_argument("--mode", choices=["random", "deterministic"],
                   default="random")
    q.add_argument("--theta0", type=float, default=0.0,
                   help="incidence direction for deterministic mode")
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--index", type=int, default=0)
    q.add_argument("--grid-h", type=float, default=0.2, dest="grid_h")
    common(q, rmax=2.0 * math.pi, points=0)
    q.set_defaults(fn=cmd_field)

    q = sub.add_parser("nearest-vortex", help="P_beta and <R_nv>_delta tables")
    _add_flux_args(q)
    common(q, rmax=4.0, points=200)
    q.set_defaults(fn=cmd_nearest_vortex)

    q = sub.add_parser("excess", help="N(R, beta) and N-bar(beta) tables")
    _add_flux_args(q)
    common(q, rmax=4.0 * math.pi, points=120)
    q.set_defaults(fn=cmd_excess)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as e:
        return int(e.code or 0)
    except DomainError as e:
        print(f"abwave: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

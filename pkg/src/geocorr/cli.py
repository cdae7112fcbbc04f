"""Command-line harness.

Subcommands:
  enumerate    dump the norm ball of quadrant-I matrices to CSV
  empirical    empirical pair-correlation curve from enumerated angles
  theoretical  limiting density and cumulative curve on an x-grid
  geodesics    table of symmetric classes with discriminant data
  compare      empirical vs limiting density, with figure and exit code

Exit codes: 0 ok, 1 tolerance failure (compare), 2 usage error.
All x-axes match the plotted normalization: x = (3/4pi) xi for angles,
x = (3/8) xi for half-angle tangents.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import cache, geodesics, lattice, pairstats, semigroup, theory

DEFAULT_CACHE = os.path.join(os.path.expanduser("~"), ".cache", "geocorr")


@dataclass(frozen=True)
class RunConfig:
    command: str
    Q: int = 4000
    xi_max: float = 1.2
    grid_step: float = 0.01
    bins: float = 0.05
    cutoff_norm_sq: int = 40000
    mc_samples: int = 10 ** 6
    seed: int = 0
    convention: str = pairstats.ANGLE
    out_path: str = "out.csv"
    allow_extrapolation: bool = False
    tolerance: float = 0.05
    cache_dir: str = DEFAULT_CACHE

    def __post_init__(self) -> None:
        if self.Q < 2:
            raise ValueError("--q must be >= 2")
        if self.grid_step <= 0 or self.xi_max <= 0 or self.bins <= 0:
            raise ValueError("grid parameters must be positive")
        if self.mc_samples < 10 ** 4:
            raise ValueError("--mc-samples must be >= 10^4")


def _sample_values(cfg: RunConfig) -> np.ndarray:
    """Sorted sample values for cfg.convention at cfg.Q, cached."""
    key = cache.config_key("samples", Q=cfg.Q, convention=cfg.convention)
    hit = cache.load_arrays(cfg.cache_dir, key)
    if hit is not None:
        return hit["values"]
    table = lattice.ball_table(cfg.Q)
    if cfg.convention == pairstats.ANGLE:
        values = np.sort(2.0 / math.pi * table["theta"])
    else:
        values = np.sort(table["psi"])
    cache.save_arrays(cfg.cache_dir, key, {"values": values})
    return values


def _x_grid(cfg: RunConfig) -> np.ndarray:
    n = int(round(cfg.xi_max / cfg.grid_step))
    return np.arange(n + 1) * cfg.grid_step


def run_enumerate(cfg: RunConfig) -> int:
    table = lattice.ball_table(cfg.Q)
    lattice.write_lattice_csv(cfg.out_path, table)
    print(f"B_Q = {len(table['q'])} at Q = {cfg.Q} -> {cfg.out_path}")
    return 0


def run_empirical(cfg: RunConfig) -> int:
    values = _sample_values(cfg)
    samples = pairstats.AngleSampleSet(values, len(values), cfg.convention)
    xs = _x_grid(cfg)
    curve = pairstats.pair_correlation(samples, xs)
    pairstats.write_curve_csv(cfg.out_path, curve)
    print(f"empirical curve at Q = {cfg.Q} ({cfg.convention}), "
          f"B_Q = {len(values)} -> {cfg.out_path}")
    return 0


def run_theoretical(cfg: RunConfig) -> int:
    xs = _x_grid(cfg)
    model = theory.TheoreticalModel(cfg.cutoff_norm_sq, cfg.mc_samples,
                                    cfg.seed)
    dens, tails = model.density_grid(xs, cfg.allow_extrapolation)
    pairstats.write_curve_csv(
        cfg.out_path,
        pairstats.CorrelationCurve(xs, dens, pairstats.THEORETICAL),
        density_axis=True)
    cum, cum_tails = model.cumulative_grid(
        xs, allow_extrapolation=cfg.allow_extrapolation)
    root, ext = os.path.splitext(cfg.out_path)
    cum_path = root + "_R" + (ext or ".csv")
    pairstats.write_curve_csv(
        cum_path, pairstats.CorrelationCurve(xs, cum, pairstats.THEORETICAL))
    print(f"density (max tail {tails.max():.2e}) -> {cfg.out_path}")
    print(f"cumulative R -> {cum_path}")
    print(f"spike expected at x = {theory.SPIKE_X:.6f}")
    return 0


def run_geodesics(cfg: RunConfig) -> int:
    elements = semigroup.enumerate_semigroup(cfg.cutoff_norm_sq)
    geodesics.write_geodesic_csv(cfg.out_path, elements)
    g_semi = semigroup.g2_zero(cfg.cutoff_norm_sq)
    alpha_max = (cfg.cutoff_norm_sq
                 + math.sqrt(max(cfg.cutoff_norm_sq ** 2 - 4, 0))) / 2.0
    g_arith = geodesics.g2_zero_arithmetic(alpha_max)
    print(f"{len(elements)} classes with trace <= {cfg.cutoff_norm_sq} "
          f"-> {cfg.out_path}")
    print(f"g2(0) semigroup : {g_semi.value:.6f} (tail {g_semi.tail_bound:.2e})")
    print(f"g2(0) arithmetic: {g_arith.value:.6f} (tail {g_arith.tail_bound:.2e})")
    diff = abs(g_semi.value - g_arith.value)
    budget = g_semi.tail_bound + g_arith.tail_bound
    print(f"difference {diff:.2e} vs combined tails {budget:.2e}")
    return 0 if diff <= budget else 1


def run_compare(cfg: RunConfig) -> int:
    if cfg.convention != pairstats.ANGLE:
        print("error: compare has a closed-form density only for the "
              "angle convention", file=sys.stderr)
        return 2
    values = _sample_values(cfg)
    samples = pairstats.AngleSampleSet(values, len(values), cfg.convention)
    emp = pairstats.histogram_density(samples, cfg.bins, cfg.xi_max)
    model = theory.TheoreticalModel(cfg.cutoff_norm_sq, cfg.mc_samples,
                                    cfg.seed)
    centers = emp.grid
    # bin-averaged theoretical density, to match what a histogram
    # estimates; bins beyond the closed-form range stay NaN
    x_cap = theory.XI_CLOSED_FORM_MAX / theory.ANGLE_XI_PER_X
    edges = np.concatenate([centers - cfg.bins / 2, centers[-1:] + cfg.bins / 2])
    theo = np.full_like(centers, np.nan)
    inside = edges[1:] <= x_cap + 1e-12
    if inside.any():
        hi = edges[1:][inside].max()
        cum, _ = model.cumulative_grid(np.clip(edges, 0.0, hi))
        avg = np.diff(cum) / cfg.bins
        theo[inside] = avg[inside]

    _write_compare_csv(cfg.out_path, centers, emp.values, theo)
    png_path = os.path.splitext(cfg.out_path)[0] + ".png"
    _render_compare_png(png_path, centers, emp.values, theo)

    in_range = (centers >= 0.05) & (centers <= 0.95) & ~np.isnan(theo)
    sup = float(np.abs(emp.values[in_range] - theo[in_range]).max())
    print(f"B_Q = {len(values)} at Q = {cfg.Q}")
    print(f"sup |empirical - theoretical| on x in [0.05, 0.95]: {sup:.4f} "
          f"(tolerance {cfg.tolerance})")
    print(f"report -> {cfg.out_path}, figure -> {png_path}")
    return 0 if sup <= cfg.tolerance else 1


def _write_compare_csv(path: str, xs, emp, theo) -> None:
    import csv

    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "g2_empirical", "g2_theoretical", "diff"))
        for x, e, t in zip(xs, emp, theo):
            d = e - t if not math.isnan(t) else float("nan")
            w.writerow([repr(float(x)), repr(float(e)), repr(float(t)),
                        repr(float(d))])


def _render_compare_png(path: str, xs, emp, theo) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(xs, emp, width=(xs[1] - xs[0]) if len(xs) > 1 else 0.05,
           color="lightsteelblue", edgecolor="steelblue",
           label="empirical histogram")
    ok = ~np.isnan(theo)
    ax.plot(xs[ok], theo[ok], "r-", lw=1.5, label="limiting density")
    ax.axvline(theory.SPIKE_X, color="gray", ls=":", lw=1,
               label=f"spike x = {theory.SPIKE_X:.4f}")
    ax.set_xlabel("x")
    ax.set_ylabel("g2(x)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="geocorr",
        description="Pair correlation of angles in the hyperbolic lattice "
                    "orbit of i: enumeration, empirical statistics, and "
                    "limiting-formula evaluation.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("enumerate", "dump the norm ball to CSV"),
        ("empirical", "empirical pair correlation curve"),
        ("theoretical", "limiting density and cumulative curve"),
        ("geodesics", "symmetric classes with discriminant data"),
        ("compare", "empirical vs limiting density"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--q", type=int, default=4000,
                        help="enumeration bound Q (default 4000)")
        sp.add_argument("--xi-max", type=float, default=1.2,
                        help="grid upper end on the x-axis (default 1.2)")
        sp.add_argument("--grid-step", type=float, default=0.01,
                        help="grid step (default 0.01)")
        sp.add_argument("--bins", type=float, default=0.05,
                        help="histogram bin width (default 0.05)")
        sp.add_argument("--cutoff-norm-sq", type=int, default=40000,
                        help="semigroup truncation T <= cutoff "
                             "(default 40000)")
        sp.add_argument("--mc-samples", type=int, default=10 ** 6,
                        help="Monte Carlo sample count (default 1e6)")
        sp.add_argument("--seed", type=int, default=0,
                        help="Monte Carlo seed (default 0)")
        sp.add_argument("--convention", choices=["tan", "angle"],
                        default="angle",
                        help="sample values: tan(theta/2) or (2/pi)theta")
        sp.add_argument("--out", default="out.csv", help="output CSV path")
        sp.add_argument("--allow-extrapolation", action="store_true",
                        help="evaluate the density beyond xi = 4 using "
                             "Monte Carlo exterior terms")
        sp.add_argument("--tolerance", type=float, default=0.05,
                        help="compare: sup-difference tolerance "
                             "(default 0.05)")
        sp.add_argument("--cache-dir", default=DEFAULT_CACHE,
                        help="cache directory for enumeration results")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command, Q=args.q, xi_max=args.xi_max,
            grid_step=args.grid_step, bins=args.bins,
            cutoff_norm_sq=args.cutoff_norm_sq, mc_samples=args.mc_samples,
            seed=args.seed,
            convention=(pairstats.TAN if args.convention == "tan"
                        else pairstats.ANGLE),
            out_path=args.out, allow_extrapolation=args.allow_extrapolation,
            tolerance=args.tolerance, cache_dir=args.cache_dir)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    handler = {
        "enumerate": run_enumerate,
        "empirical": run_empirical,
        "theoretical": run_theoretical,
        "geodesics": run_geodesics,
        "compare": run_compare,
    }[cfg.command]
    try:
        return handler(cfg)
    except theory.ExtrapolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

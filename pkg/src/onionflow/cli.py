"""Command-line entry point: ``onionflow <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acsf, harness
from .export import write_csv, write_profile, write_svg
from .peeling import RowIntervalSet, fraction_threshold, iter_layers, rasterize
from .quadrant import hyperbola_fit_extent, k_n, quadrant_snapshots
from .regions import Region, get_region, load_regions

log = logging.getLogger("onionflow")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _resolve_regions(names, regions_file) -> list[Region]:
    table = load_regions(regions_file) if regions_file else {}
    out = []
    for name in names or []:
        out.append(table[name] if name in table else get_region(name))
    if not out and table:
        out = list(table.values())
    return out


def _layer_svg_groups(records, every: int, n: int = 1) -> dict:
    polys = [np.asarray(r.vertices.vertices, dtype=float) / n for r in records if (r.index - 1) % every == 0]
    return {"layers": polys}


def cmd_peel_square(args) -> int:
    records = list(iter_layers(RowIntervalSet.rectangle(args.m, args.m)))
    out = Path(args.out)
    write_csv(out / "layers.csv", ("index", "vertex_count", "remaining_points"),
              ((r.index, r.vertex_count, r.remaining_points) for r in records))
    every = args.svg_every or max(1, len(records) // 15)
    write_svg(out / "layers.svg", _layer_svg_groups(records, every))
    print(f"layers: {len(records)}")
    print(f"layers / m^(4/3): {len(records) / args.m ** (4 / 3):.6f}")
    return 0


def cmd_peel_shape(args) -> int:
    (region,) = _resolve_regions([args.region], args.regions_file) or [get_region("R2")]
    grid = rasterize(region, args.n)
    total = len(grid)
    records = list(iter_layers(grid))
    out = Path(args.out)
    write_csv(out / "layers.csv", ("index", "vertex_count", "remaining_points"),
              ((r.index, r.vertex_count, r.remaining_points) for r in records))
    every = args.svg_every or max(1, len(records) // 15)
    write_svg(out / "layers.svg", _layer_svg_groups(records, every, args.n))
    print(f"region {region.label}: {total} points, {len(records)} layers")
    for f in args.fractions or []:
        stop = fraction_threshold(total, f)
        m = next(r.index for r in records if r.remaining_points <= stop)
        print(f"fraction {f}: {m} iterations")
    return 0


def cmd_peel_quadrant(args) -> int:
    alphas = args.alpha or []
    header = ["n", "layer_size", "s", "K_n"] + [f"x_alpha_{a:g}" for a in alphas]
    rows = []
    last = None
    for prof in quadrant_snapshots(range(1, args.n + 1, args.every)):
        K = k_n(prof)
        xs = [hyperbola_fit_extent(prof, a).x_alpha for a in alphas]
        rows.append([prof.n, int(prof.layer_sizes[-1]), prof.s, K] + xs)
        last = prof
    if last is None or last.n != args.n:
        (last,) = quadrant_snapshots([args.n])
        xs = [hyperbola_fit_extent(last, a).x_alpha for a in alphas]
        rows.append([last.n, int(last.layer_sizes[-1]), last.s, k_n(last)] + xs)
    out = Path(args.out)
    write_csv(out / "quadrant_layers.csv", header, rows)
    write_profile(out / "profile.txt", last.a, last.x_end)
    print(f"s({last.n}) = {last.s}, K_n = {k_n(last)}")
    return 0


def cmd_acsf(args) -> int:
    if args.region in (None, "disk", "R5") and args.r0 is not None:
        r0 = Fraction(str(args.r0))
        region = Region("disk", center=(r0, r0), diameter=2 * r0, name="disk")
    else:
        (region,) = _resolve_regions([args.region or "disk"], args.regions_file)
    params = acsf.StepParams(c_step=args.c_step, lam=args.lam)
    start = acsf.sample_region_boundary(region, args.m)
    f = args.stop_area_fraction
    slices = [1 - (1 - f) * (k + 1) / args.snapshots for k in range(args.snapshots)]
    slices[-1] = f
    res = acsf.run_to_fractions(start, slices, params)
    t = res[-1][2]
    out = Path(args.out)
    snaps = [(0.0, start.points)] + [(tk, c.points) for _, c, tk in res]
    write_csv(out / "acsf_curve.csv", ("t", "x", "y"), ((tk, x, y) for tk, pts in snaps for x, y in pts))
    write_svg(out / "acsf.svg", {"acsf": [p for _, p in snaps]})
    print(f"t = {t!r} at area fraction {f}")
    if region.kind == "disk":
        exact = acsf.circle_time_to_area(region.radius, f)
        print(f"closed form t = {exact!r}, relative error {abs(t - exact) / exact:.3e}")
    return 0


def cmd_compare(args) -> int:
    regions = _resolve_regions(args.region or (["R2"] if not args.regions_file else []), args.regions_file)
    params = acsf.StepParams(c_step=args.c_step, lam=args.lam)
    fractions = args.fractions or list(harness.DEFAULT_FRACTIONS)
    out = Path(args.out)
    recs = harness.compare_many(regions, args.n, fractions, args.samples, params)
    harness.write_comparison_csv(out / "comparison.csv", recs)
    for region in regions:
        for n in args.n:
            chains: dict = {}
            harness.compare_experiment(region, n, fractions, args.samples, params, chains=chains)
            groups = {"acsf": [c[1].vertices for c in chains.values()], "peeling": [c[0].vertices for c in chains.values()]}
            write_svg(out / f"compare_{region.label}_{n}.svg", groups)
    for r in recs:
        print(f"{r.region} n={r.n} f={r.fraction}: m={r.m_layers} t={r.t_flow:.6g} "
              f"hausdorff={r.hausdorff:.3e} c={r.c_est:.4f}")
    return 0


def cmd_quadrant_report(args) -> int:
    rows = harness.quadrant_experiment(args.n, args.alpha or [0.1, 0.03, 0.01, 0.003])
    harness.write_quadrant_csv(Path(args.out) / "quadrant_report.csv", rows)
    for r in rows:
        print(f"n={r.n} alpha={r.alpha}: x_alpha/K_n={r.ratio:.4f} c={r.c_est:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onionflow", description="Grid peeling and affine curve-shortening experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
        return sp

    sp = common(sub.add_parser("peel-square", help="peel the m x m grid"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--svg-every", type=int, default=0)
    sp.set_defaults(func=cmd_peel_square)

    sp = common(sub.add_parser("peel-shape", help="peel a rasterized convex region"))
    sp.add_argument("--region", default="R2")
    sp.add_argument("--regions-file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--fractions", type=_float_list)
    sp.add_argument("--svg-every", type=int, default=0)
    sp.set_defaults(func=cmd_peel_shape)

    sp = common(sub.add_parser("peel-quadrant", help="peel the quarter grid N^2"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--alpha", type=float, action="append")
    sp.add_argument("--every", type=int, default=1, help="write every k-th iteration")
    sp.set_defaults(func=cmd_peel_quadrant)

    sp = common(sub.add_parser("acsf", help="simulate the flow on a region boundary"))
    sp.add_argument("--region")
    sp.add_argument("--regions-file")
    sp.add_argument("--r0", type=float, help="disk radius (disk region only)")
    sp.add_argument("--m", type=int, default=1024)
    sp.add_argument("--c-step", type=float, default=acsf.StepParams().c_step)
    sp.add_argument("--lambda", dest="lam", type=float, default=acsf.StepParams().lam)
    sp.add_argument("--stop-area-fraction", type=float, default=0.75)
    sp.add_argument("--snapshots", type=int, default=5)
    sp.set_defaults(func=cmd_acsf)

    sp = common(sub.add_parser("compare", help="peeling vs. flow Hausdorff table"))
    sp.add_argument("--region", action="append")
    sp.add_argument("--regions-file")
    sp.add_argument("--n", type=_int_list, default=[500, 1000, 2000])
    sp.add_argument("--fractions", type=_float_list)
    sp.add_argument("--samples", type=int, default=harness.REFERENCE_SAMPLES)
    sp.add_argument("--c-step", type=float, default=harness.REFERENCE_PARAMS.c_step)
    sp.add_argument("--lambda", dest="lam", type=float, default=harness.REFERENCE_PARAMS.lam)
    sp.set_defaults(func=cmd_compare)

    sp = common(sub.add_parser("quadrant-report", help="hyperbola closeness and c for N^2"))
    sp.add_argument("--n", type=_int_list, default=[1000, 3000, 10000, 30000])
    sp.add_argument("--alpha", type=float, action="append")
    sp.set_defaults(func=cmd_quadrant_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    config = {k: v for k, v in vars(args).items() if k != "func"}
    print("config: " + json.dumps(config, sort_keys=True, default=str))
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"onionflow: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

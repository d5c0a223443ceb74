"""Experiment drivers: peeling vs. flow comparisons and quadrant reports."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import acsf
from .acsf import StepParams
from .export import thread_cap, write_csv
from .geometry import ConvexChain, hausdorff_distance
from .peeling import Peeler, hull_chain, rasterize
from .quadrant import estimate_c_quadrant, hyperbola_fit_extent, k_n, quadrant_snapshots
from .regions import Region

DEFAULT_FRACTIONS = (0.95, 0.90, 0.85, 0.80, 0.75)
REFERENCE_SAMPLES = 1024
REFERENCE_PARAMS = StepParams(c_step=0.02, lam=0.5)
EXACT_BOUNDARY_SAMPLES = 16384

COMPARISON_HEADER = ("region", "n", "fraction", "m_layers", "t_flow", "hausdorff", "initial_hausdorff", "c_est")
QUADRANT_HEADER = ("n", "alpha", "K_n", "x_alpha", "ratio", "saturated", "c_est")


def estimate_c(m: int, t: float, n: int) -> float:
    """Solve m = c t n^(4/3) for c."""
    if t <= 0:
        raise ValueError("flow time must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    return m / (t * n ** (4.0 / 3.0))


@dataclass(frozen=True)
class ComparisonRecord:
    region: str
    n: int
    fraction: float
    m_layers: int
    t_flow: float
    hausdorff: float
    initial_hausdorff: float
    c_est: float

    def row(self) -> tuple:
        return astuple(self)


@lru_cache(maxsize=32)
def flow_reference(region: Region, fractions: tuple, samples: int = REFERENCE_SAMPLES,
                   params: StepParams = REFERENCE_PARAMS) -> tuple:
    """(fraction, curve points, t) per fraction, for the flow side of a comparison.

    Disks use the closed-form shrinking circle instead of a simulation.
    """
    if region.kind == "disk":
        r0 = region.radius
        cx, cy = map(float, region.center)
        ang = 2 * math.pi * np.arange(EXACT_BOUNDARY_SAMPLES) / EXACT_BOUNDARY_SAMPLES
        out = []
        for f in fractions:
            t = acsf.circle_time_to_area(r0, f)
            r = acsf.circle_radius(r0, t)
            out.append((f, np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)]), t))
        return tuple(out)
    start = acsf.sample_region_boundary(region, samples)
    res = acsf.run_to_fractions(start, fractions, params)
    return tuple((f, np.asarray(c.points), t) for f, c, t in res)


def exact_boundary(region: Region) -> ConvexChain:
    if region.is_polygonal:
        return ConvexChain(np.array([[float(x), float(y)] for x, y in region.vertices]))
    return ConvexChain(region.boundary(EXACT_BOUNDARY_SAMPLES))


def compare_experiment(region: Region, n: int, fractions: Sequence[float] = DEFAULT_FRACTIONS,
                       samples: int = REFERENCE_SAMPLES, params: StepParams = REFERENCE_PARAMS,
                       chains: dict | None = None) -> list[ComparisonRecord]:
    """Peel G_[n](region) and flow its boundary to the same fractions, then compare.

    Peeling stops on point count, the flow on enclosed area. The peeling
    hull is divided by n so both curves live in the region's frame. If
    ``chains`` is a dict it receives (fraction -> (peel chain, flow chain)).
    """
    fr = tuple(float(f) for f in fractions)
    if not fr or not all(0 < f < 1 for f in fr):
        raise ValueError("fractions must lie strictly between 0 and 1")
    flow = {f: (pts, t) for f, pts, t in flow_reference(region, tuple(sorted(set(fr), reverse=True)), samples, params)}
    grid = rasterize(region, n)
    initial = hausdorff_distance(_scaled(hull_chain(grid), n), exact_boundary(region))
    peeler = Peeler(grid)
    out = {}
    for f in sorted(set(fr), reverse=True):
        m = peeler.peel_to_fraction(f)
        pts, t = flow[f]
        peel_chain = _scaled(peeler.hull(), n)
        flow_chain = ConvexChain(pts)
        if chains is not None:
            chains[f] = (peel_chain, flow_chain)
        out[f] = ComparisonRecord(region.label, n, f, m, float(t), hausdorff_distance(peel_chain, flow_chain),
                                  initial, estimate_c(m, t, n))
    return [out[f] for f in fr]


def _scaled(chain: ConvexChain, n: int) -> ConvexChain:
    return ConvexChain(np.asarray(chain.vertices, dtype=float) / n)


def _compare_cell(args):
    region, n, fractions, samples, params = args
    return compare_experiment(region, n, fractions, samples, params)


def compare_many(regions: Iterable[Region], ns: Iterable[int], fractions: Sequence[float] = DEFAULT_FRACTIONS,
                 samples: int = REFERENCE_SAMPLES, params: StepParams = REFERENCE_PARAMS,
                 workers: int | None = None) -> list[ComparisonRecord]:
    """All (region, n) cells, merged in sorted (region, n, fraction) order.

    Cells run in up to ``workers`` processes (default: ONIONFLOW_THREADS).
    """
    cells = [(r, int(n), tuple(fractions), samples, params) for r in regions for n in ns]
    workers = thread_cap() if workers is None else max(1, workers)
    if workers == 1 or len(cells) == 1:
        results = [_compare_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
            results = list(pool.map(_compare_cell, cells))
    recs = [r for res in results for r in res]
    return sorted(recs, key=lambda r: (r.region, r.n, -r.fraction))


def write_comparison_csv(path, records: Iterable[ComparisonRecord]):
    return write_csv(path, COMPARISON_HEADER, (r.row() for r in records))


@dataclass(frozen=True)
class QuadrantRow:
    n: int
    alpha: float
    K_n: float
    x_alpha: int
    ratio: float
    saturated: bool
    c_est: float


def quadrant_experiment(n_values: Iterable[int], alphas: Iterable[float]) -> list[QuadrantRow]:
    """Hyperbola-closeness and c estimates for each (n, alpha), from one peeling run."""
    alphas = list(alphas)
    rows = []
    for prof in quadrant_snapshots(n_values):
        K = k_n(prof)
        c = estimate_c_quadrant(K, prof.n)
        for a in alphas:
            ext = hyperbola_fit_extent(prof, a)
            rows.append(QuadrantRow(prof.n, float(a), K, ext.x_alpha, ext.ratio, ext.saturated, c))
    return rows


def write_quadrant_csv(path, rows: Iterable[QuadrantRow]):
    assert tuple(f.name for f in fields(QuadrantRow)) == QUADRANT_HEADER
    return write_csv(path, QUADRANT_HEADER, (astuple(r) for r in rows))

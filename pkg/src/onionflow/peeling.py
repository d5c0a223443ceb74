"""Convex-layer peeling of lattice-convex grid sets.

A lattice-convex set is stored as one [x_min, x_max] interval per row.
Hull vertices are always row extremes and the residue of a peeling step is
again lattice-convex, so the representation is closed under peeling and a
step costs O(rows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _kernels
from .geometry import COORD_LIMIT, ConvexChain, GeometryError
from .regions import Region, region_rows


class EmptySetError(GeometryError):
    pass


@dataclass(frozen=True)
class LayerRecord:
    index: int
    vertices: ConvexChain
    vertex_count: int
    remaining_points: int


class RowIntervalSet:
    """Grid points {(x, y) : xmin[y - y_base] <= x <= xmax[y - y_base]}.

    An empty row has xmin > xmax. Instances are treated as values: the
    public peeling functions never modify their argument.
    """

    def __init__(self, y_base: int, xmin, xmax):
        xmin = np.array(xmin, dtype=np.int64)
        xmax = np.array(xmax, dtype=np.int64)
        if xmin.shape != xmax.shape or xmin.ndim != 1:
            raise ValueError("xmin and xmax must be 1-d arrays of equal length")
        lim = COORD_LIMIT
        if len(xmin) and (abs(y_base) >= lim or abs(y_base + len(xmin)) >= lim):
            raise GeometryError("row coordinates out of range")
        live = xmin <= xmax
        if live.any() and (np.abs(xmin[live]).max() >= lim or np.abs(xmax[live]).max() >= lim):
            raise GeometryError("column coordinates out of range")
        self.y_base = int(y_base)
        self.xmin = xmin
        self.xmax = xmax

    @classmethod
    def from_points(cls, points) -> "RowIntervalSet":
        """Build from an explicit point list; every row must be contiguous."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
        if len(pts) == 0:
            return cls(0, [], [])
        pts = np.unique(pts, axis=0)
        ys = pts[:, 1]
        y0, y1 = int(ys.min()), int(ys.max())
        rows = y1 - y0 + 1
        xmin = np.full(rows, 1, dtype=np.int64)
        xmax = np.full(rows, 0, dtype=np.int64)
        counts = np.zeros(rows, dtype=np.int64)
        r = ys - y0
        np.add.at(counts, r, 1)
        lo = np.full(rows, np.iinfo(np.int64).max)
        hi = np.full(rows, np.iinfo(np.int64).min)
        np.minimum.at(lo, r, pts[:, 0])
        np.maximum.at(hi, r, pts[:, 0])
        has = counts > 0
        if np.any(hi[has] - lo[has] + 1 != counts[has]):
            raise ValueError("point set has a row that is not a contiguous interval")
        xmin[has], xmax[has] = lo[has], hi[has]
        return cls(y0, xmin, xmax)

    @classmethod
    def rectangle(cls, width: int, height: int, x0: int = 0, y0: int = 0) -> "RowIntervalSet":
        """The width x height block of lattice points with lower-left corner (x0, y0)."""
        return cls(y0, np.full(height, x0), np.full(height, x0 + width - 1))

    def copy(self) -> "RowIntervalSet":
        return RowIntervalSet(self.y_base, self.xmin.copy(), self.xmax.copy())

    @property
    def rows(self) -> list:
        return [(int(a), int(b)) if a <= b else None for a, b in zip(self.xmin, self.xmax)]

    def __len__(self) -> int:
        return int(np.maximum(self.xmax - self.xmin + 1, 0).sum())

    def is_empty(self) -> bool:
        return not np.any(self.xmin <= self.xmax)

    def active_range(self) -> tuple[int, int]:
        live = np.flatnonzero(self.xmin <= self.xmax)
        if len(live) == 0:
            return 0, -1
        return int(live[0]), int(live[-1])

    def points(self) -> np.ndarray:
        out = []
        for r, (a, b) in enumerate(zip(self.xmin.tolist(), self.xmax.tolist())):
            if a <= b:
                xs = np.arange(a, b + 1, dtype=np.int64)
                out.append(np.column_stack([xs, np.full(len(xs), self.y_base + r, dtype=np.int64)]))
        return np.vstack(out) if out else np.zeros((0, 2), dtype=np.int64)

    def point_set(self) -> set:
        return set(map(tuple, self.points().tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RowIntervalSet):
            return NotImplemented
        return self.point_set() == other.point_set()

    def __repr__(self) -> str:
        return f"RowIntervalSet(y_base={self.y_base}, rows={len(self.xmin)}, points={len(self)})"


def rasterize(region: Region, n: int) -> RowIntervalSet:
    """Lattice points p with p / n in the closed region, in integer units."""
    y_base, xmin, xmax = region_rows(region, n)
    return RowIntervalSet(y_base, xmin, xmax)


def _chain_from_kernel(verts: np.ndarray) -> ConvexChain:
    # rotate so the lexicographically smallest vertex leads, like convex_hull()
    if len(verts) <= 2:
        verts = verts[np.lexsort((verts[:, 1], verts[:, 0]))]
    else:
        i = int(np.lexsort((verts[:, 1], verts[:, 0]))[0])
        verts = np.roll(verts, -i, axis=0)
    return ConvexChain(verts)


def hull_chain(s: RowIntervalSet) -> ConvexChain:
    lo, hi = s.active_range()
    if lo > hi:
        raise EmptySetError("hull of an empty set")
    return _chain_from_kernel(_kernels.hull_rows(s.xmin, s.xmax, s.y_base, lo, hi))


def peel_step(s: RowIntervalSet) -> tuple[RowIntervalSet, LayerRecord]:
    lo, hi = s.active_range()
    if lo > hi:
        raise EmptySetError("cannot peel an empty set")
    out = s.copy()
    verts = _kernels.hull_rows(out.xmin, out.xmax, out.y_base, lo, hi)
    _kernels.remove_vertices(out.xmin, out.xmax, out.y_base, verts)
    rec = LayerRecord(1, _chain_from_kernel(verts), len(verts), len(out))
    return out, rec


def iter_layers(s: RowIntervalSet, limit: int | None = None) -> Iterator[LayerRecord]:
    """Yield one record per layer until the set is exhausted (or ``limit`` layers)."""
    work = s.copy()
    lo, hi = work.active_range()
    remaining = len(work)
    index = 0
    while lo <= hi and (limit is None or index < limit):
        verts = _kernels.hull_rows(work.xmin, work.xmax, work.y_base, lo, hi)
        _kernels.remove_vertices(work.xmin, work.xmax, work.y_base, verts)
        remaining -= len(verts)
        index += 1
        yield LayerRecord(index, _chain_from_kernel(verts), len(verts), remaining)
        while lo <= hi and work.xmin[lo] > work.xmax[lo]:
            lo += 1
        while hi >= lo and work.xmin[hi] > work.xmax[hi]:
            hi -= 1


class Peeler:
    """In-place peeling state for long runs; sizes of every layer are kept."""

    def __init__(self, s: RowIntervalSet):
        self.set = s.copy()
        self.initial = len(self.set)
        self.remaining = self.initial
        self.lo, self.hi = self.set.active_range()
        self.layer_sizes: list[int] = []

    @property
    def iterations(self) -> int:
        return len(self.layer_sizes)

    def peel_to(self, stop_at: int, max_steps: int | None = None) -> int:
        """Peel until at most ``stop_at`` points remain; returns steps taken."""
        cap = max_steps if max_steps is not None else self.remaining + 1
        sizes = np.zeros(min(cap, self.remaining + 1), dtype=np.int64)
        st = self.set
        steps, self.remaining, self.lo, self.hi = _kernels.peel_to_count(
            st.xmin, st.xmax, st.y_base, self.lo, self.hi, self.remaining, stop_at, len(sizes), sizes
        )
        self.layer_sizes.extend(int(v) for v in sizes[:steps])
        return int(steps)

    def peel_to_fraction(self, fraction: float) -> int:
        """Peel until remaining <= fraction * initial; returns total iterations so far."""
        self.peel_to(fraction_threshold(self.initial, fraction))
        return self.iterations

    def hull(self) -> ConvexChain:
        return hull_chain(self.set)


def fraction_threshold(total: int, fraction) -> int:
    """Largest point count that satisfies count <= fraction * total."""
    f = Fraction(str(fraction)) if not isinstance(fraction, Fraction) else fraction
    if not 0 < f < 1:
        raise ValueError("fraction must lie strictly between 0 and 1")
    return math.floor(f * total)


def peel_until_fraction(s: RowIntervalSet, fraction: float) -> tuple[RowIntervalSet, int]:
    """Peel until the point count first drops to ``fraction`` of its start."""
    p = Peeler(s)
    m = p.peel_to_fraction(fraction)
    return p.set, m


def layer_count(s: RowIntervalSet) -> int:
    if s.is_empty():
        raise EmptySetError("layer count of an empty set")
    p = Peeler(s)
    p.peel_to(0)
    return p.iterations

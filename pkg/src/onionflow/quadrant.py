"""Peeling the quarter grid N^2 through its column profile.

After n iterations the remaining set is {(x, y) : y >= a[x]}, where a[x]
counts the points already taken from column x. Each iteration removes the
strict vertices of the lower-left staircase chain through (x, a[x]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import _kernels
from .geometry import ConvexChain, GeometryError, diagonal_intersection, orient

MAX_ITERATIONS = 10**6


@dataclass
class QuadrantProfile:
    """Column-removal counts of N^2 after ``n`` iterations.

    ``a`` always extends at least one column past the first zero column.
    """

    n: int = 0
    a: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    layer_sizes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def s(self) -> int:
        return int(self.layer_sizes.sum())

    @property
    def x_end(self) -> int:
        """First column with nothing removed."""
        nz = np.flatnonzero(self.a == 0)
        return int(nz[0])

    def column(self, x: int) -> int:
        return int(self.a[x]) if x < len(self.a) else 0

    def copy(self) -> "QuadrantProfile":
        return QuadrantProfile(self.n, self.a.copy(), self.layer_sizes.copy())


def _scan_vertices(a: np.ndarray, x_end: int) -> list[int]:
    # reference path: full scan over every column, no run compression
    hull: list[tuple[int, int]] = []
    for x in range(x_end + 1):
        p = (x, int(a[x]))
        while len(hull) >= 2 and orient(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return [x for x, _ in hull]


def quadrant_peel_step(profile: QuadrantProfile) -> QuadrantProfile:
    """One peeling iteration, computed by the plain O(x_end) column scan."""
    x_end = profile.x_end
    a = profile.a
    if len(a) < x_end + 3:
        a = np.concatenate([a, np.zeros(x_end + 3 - len(a), dtype=np.int64)])
    else:
        a = a.copy()
    cols = _scan_vertices(a, x_end)
    a[cols] += 1
    sizes = np.append(profile.layer_sizes, len(cols)).astype(np.int64)
    return QuadrantProfile(profile.n + 1, a, sizes)


def quadrant_snapshots(ns: Iterable[int]) -> Iterator[QuadrantProfile]:
    """Yield copies of the profile after each iteration count in ``ns``.

    A single run is advanced to max(ns); the snapshots share its history.
    """
    targets = sorted(set(int(n) for n in ns))
    if not targets:
        return
    if targets[0] < 0:
        raise ValueError("iteration counts must be nonnegative")
    top = targets[-1]
    if top > MAX_ITERATIONS:
        raise ValueError(f"n = {top} exceeds the resource guard of {MAX_ITERATIONS}")
    a = np.zeros(top + 2, dtype=np.int64)
    sizes = np.zeros(top, dtype=np.int64)
    done, x_end = 0, 0
    for n in targets:
        x_end = _kernels.quadrant_advance(a, x_end, n - done, sizes, done)
        done = n
        keep = x_end + 2
        yield QuadrantProfile(n, a[:keep].copy(), sizes[:n].copy())


def quadrant_run(n: int) -> QuadrantProfile:
    if n < 1:
        raise ValueError("n must be >= 1")
    return next(quadrant_snapshots([n]))


def staircase_chain(profile: QuadrantProfile) -> ConvexChain:
    """Strict-vertex chain of the current boundary, from the y-axis down to the x-axis."""
    a = np.ascontiguousarray(profile.a, dtype=np.int64)
    x_end = profile.x_end
    buf = [np.empty(x_end + 1, dtype=np.int64) for _ in range(4)]
    h = _kernels.staircase_vertices(a, x_end, *buf)
    pts = np.column_stack([buf[2][:h], buf[3][:h]])
    return ConvexChain(pts, closed=False)


def k_n(profile: QuadrantProfile) -> float:
    """Diagonal crossing K of the boundary of the set remaining after n iterations."""
    return diagonal_intersection(staircase_chain(profile))


class HyperbolaExtent(NamedTuple):
    x_alpha: int
    ratio: float
    saturated: bool


def hyperbola_fit_extent(profile: QuadrantProfile, alpha: float) -> HyperbolaExtent:
    """First column past K where a[x] leaves the band |a - K^2/x| <= alpha K^2/x.

    If every column before the first zero column stays inside the band the
    result is that zero column, flagged as saturated.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    K = k_n(profile)
    if K <= 0:
        raise ValueError("K_n is zero; run at least one iteration")
    x_end = profile.x_end
    start = math.floor(K) + 1
    xs = np.arange(start, x_end, dtype=np.int64)
    f = K * K / xs
    bad = np.flatnonzero(np.abs(profile.a[start:x_end] - f) > alpha * f)
    if len(bad):
        x = int(xs[bad[0]])
        return HyperbolaExtent(x, x / K, False)
    return HyperbolaExtent(x_end, x_end / K, True)


def estimate_c_quadrant(K: float, n: int) -> float:
    """Invert K ~ 2 (n / (3c))^(3/4) for c."""
    if K <= 0:
        raise ValueError("K must be positive")
    return n / (3.0 * (K / 2.0) ** (4.0 / 3.0))


def hyperbola_value(t: float, x):
    """Height of the exact flow solution y = (4 / 3^(3/2)) t^(3/2) / x."""
    if t <= 0:
        raise GeometryError("t must be positive")
    return (4.0 / 3.0**1.5) * t**1.5 / np.asarray(x, dtype=float)


def hyperbola_reference(t: float, x_range) -> ConvexChain:
    """Polyline sample of the hyperbola at flow time ``t``.

    ``x_range`` is either an array of abscissae or a (start, stop, count)
    triple passed to ``numpy.linspace``.
    """
    if t <= 0:
        raise GeometryError("t must be positive")
    if isinstance(x_range, tuple) and len(x_range) == 3:
        xs = np.linspace(*x_range)
    else:
        xs = np.asarray(x_range, dtype=float)
    if np.any(xs <= 0):
        raise GeometryError("hyperbola abscissae must be positive")
    xs = np.sort(xs)
    return ConvexChain(np.column_stack([xs, hyperbola_value(t, xs)]), closed=False)


def diagonal_of_hyperbola(t: float) -> float:
    return 2.0 * (t / 3.0) ** 0.75

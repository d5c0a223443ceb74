"""Convex test regions: exact lattice rasterization and boundary sampling.

Polygon and disk regions are rasterized exactly (rational arithmetic);
parametric curves are replaced by the convex hull of a dense boundary
sample, which is then rasterized row by row.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .geometry import convex_hull_float

KINDS = ("parametric-curve", "polygon", "square", "triangle", "half-disk", "disk")
PARAMETRIC_SAMPLES = 16384
_EPS = 1e-9


def _r1_curve(a: np.ndarray) -> np.ndarray:
    x = ((1.0 - np.sin(a)) / 2.0) ** 2
    y = ((1.0 - np.sin(a + 2.0)) / 2.0) ** 1.3
    return np.column_stack([x, y])


CURVES: dict[str, Callable[[np.ndarray], np.ndarray]] = {"R1": _r1_curve}


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v).strip())


@dataclass(frozen=True)
class Region:
    kind: str
    vertices: tuple = ()
    center: tuple = (Fraction(1, 2), Fraction(1, 2))
    diameter: Fraction = Fraction(1)
    curve: str = ""
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind in ("polygon", "square", "triangle"):
            verts = tuple((_frac(x), _frac(y)) for x, y in self.vertices)
            if len(verts) < 3:
                raise ValueError("polygon regions need at least 3 vertices")
            if self.kind == "triangle" and len(verts) != 3:
                raise ValueError("triangle needs exactly 3 vertices")
            if _signed_area2(verts) < 0:
                verts = verts[::-1]
            if not _is_convex(verts):
                raise ValueError("polygon region is not convex")
            object.__setattr__(self, "vertices", verts)
        if self.kind in ("disk", "half-disk"):
            object.__setattr__(self, "center", (_frac(self.center[0]), _frac(self.center[1])))
            object.__setattr__(self, "diameter", _frac(self.diameter))
            if self.diameter <= 0:
                raise ValueError("diameter must be positive")
        if self.kind == "parametric-curve" and self.curve not in CURVES:
            raise ValueError(f"unknown parametric curve {self.curve!r}")

    @property
    def label(self) -> str:
        return self.name or self.kind

    @property
    def radius(self) -> float:
        return float(self.diameter) / 2.0

    @property
    def is_polygonal(self) -> bool:
        return self.kind in ("polygon", "square", "triangle")

    def contains_scaled(self, x: int, y: int, n: int) -> bool:
        """Exact membership test of the lattice point (x, y)/n (not for parametric)."""
        if self.is_polygonal:
            p = (Fraction(x, n), Fraction(y, n))
            v = self.vertices
            return all(_orient(v[i], v[(i + 1) % len(v)], p) >= 0 for i in range(len(v)))
        if self.kind in ("disk", "half-disk"):
            cx, cy = self.center
            dx, dy = Fraction(x, n) - cx, Fraction(y, n) - cy
            inside = dx * dx + dy * dy <= (self.diameter / 2) ** 2
            return inside and (self.kind == "disk" or dy >= 0)
        raise ValueError("exact membership is not available for parametric regions")

    def hull_polygon(self) -> np.ndarray:
        """Float CCW polygon used for rasterizing parametric regions."""
        a = np.linspace(0.0, 2.0 * math.pi, PARAMETRIC_SAMPLES, endpoint=False)
        return np.asarray(convex_hull_float(CURVES[self.curve](a)).vertices)

    def area(self) -> float:
        if self.is_polygonal:
            return float(_signed_area2(self.vertices)) / 2.0
        if self.kind == "disk":
            return math.pi * self.radius**2
        if self.kind == "half-disk":
            return math.pi * self.radius**2 / 2.0
        v = self.hull_polygon()
        return 0.5 * float(np.dot(v[:, 0], np.roll(v[:, 1], -1)) - np.dot(v[:, 1], np.roll(v[:, 0], -1)))

    def boundary(self, m: int) -> np.ndarray:
        """m points on the boundary, CCW, roughly arclength-uniform.

        Corners of polygonal regions (and the two corners of a half-disk)
        are always among the samples.
        """
        if m < 3:
            raise ValueError("need at least 3 boundary samples")
        if self.kind == "disk":
            cx, cy = map(float, self.center)
            t = 2.0 * math.pi * np.arange(m) / m
            return np.column_stack([cx + self.radius * np.cos(t), cy + self.radius * np.sin(t)])
        if self.kind == "half-disk":
            return self._half_disk_boundary(m)
        if self.is_polygonal:
            verts = np.array([[float(x), float(y)] for x, y in self.vertices])
            return _sample_polygon_with_corners(verts, m)
        return resample_closed(self.hull_polygon(), m)

    def _half_disk_boundary(self, m: int) -> np.ndarray:
        cx, cy = map(float, self.center)
        r = self.radius
        arc_len, flat_len = math.pi * r, 2.0 * r
        n_flat = max(1, round(m * flat_len / (arc_len + flat_len)))
        n_arc = m - n_flat
        # flat side from (cx - r, cy) to (cx + r, cy), then arc back
        xs = cx - r + flat_len * np.arange(n_flat) / n_flat
        flat = np.column_stack([xs, np.full(n_flat, cy)])
        t = math.pi * np.arange(n_arc) / n_arc
        arc = np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)])
        return np.vstack([flat, arc])


def _orient(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _signed_area2(verts) -> Fraction:
    return sum(
        (verts[i][0] * verts[(i + 1) % len(verts)][1] - verts[(i + 1) % len(verts)][0] * verts[i][1]
         for i in range(len(verts))),
        Fraction(0),
    )


def _is_convex(verts) -> bool:
    k = len(verts)
    return all(_orient(verts[i], verts[(i + 1) % k], verts[(i + 2) % k]) >= 0 for i in range(k))


def _sample_polygon_with_corners(verts: np.ndarray, m: int) -> np.ndarray:
    k = len(verts)
    if m < k:
        raise ValueError(f"need at least {k} samples to include every corner")
    edges = np.roll(verts, -1, axis=0) - verts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    # largest-remainder apportionment of samples to edges, at least one each
    ideal = m * lengths / lengths.sum()
    counts = np.maximum(1, np.floor(ideal).astype(int))
    while counts.sum() < m:
        counts[np.argmax(ideal - counts)] += 1
    while counts.sum() > m:
        counts[np.argmax(np.where(counts > 1, counts - ideal, -np.inf))] -= 1
    pieces = []
    for i in range(k):
        t = np.arange(counts[i]) / counts[i]
        pieces.append(verts[i] + t[:, None] * edges[i])
    return np.vstack(pieces)


def resample_closed(points: np.ndarray, m: int) -> np.ndarray:
    """m arclength-uniform points along a closed polyline, starting at points[0]."""
    pts = np.asarray(points, dtype=float)
    closed = np.vstack([pts, pts[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    target = s[-1] * np.arange(m) / m
    return np.column_stack([np.interp(target, s, closed[:, 0]), np.interp(target, s, closed[:, 1])])


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


def _polygon_rows_exact(verts, n: int):
    pts = [(x * n, y * n) for x, y in verts]
    ylo = _ceil_frac(min(p[1] for p in pts))
    yhi = _floor_frac(max(p[1] for p in pts))
    xmin, xmax = [], []
    k = len(pts)
    for y in range(ylo, yhi + 1):
        xs = []
        for i in range(k):
            (x0, y0), (x1, y1) = pts[i], pts[(i + 1) % k]
            if y0 == y1:
                if y0 == y:
                    xs += [x0, x1]
            elif min(y0, y1) <= y <= max(y0, y1):
                xs.append(x0 + (x1 - x0) * (y - y0) / (y1 - y0))
        xmin.append(_ceil_frac(min(xs)))
        xmax.append(_floor_frac(max(xs)))
    return ylo, np.array(xmin, dtype=np.int64), np.array(xmax, dtype=np.int64)


def _polygon_rows_float(verts: np.ndarray, n: int):
    pts = np.asarray(verts, dtype=float) * n
    k = len(pts)
    ymin, ymax = pts[:, 1].min(), pts[:, 1].max()
    ylo, yhi = math.ceil(ymin - _EPS), math.floor(ymax + _EPS)
    ys = np.arange(ylo, yhi + 1, dtype=float)
    ys_c = np.clip(ys, ymin, ymax)

    def pick(cands, key):
        return max(cands, key=key)

    bottoms = np.flatnonzero(pts[:, 1] == ymin)
    tops = np.flatnonzero(pts[:, 1] == ymax)
    b_right = pick(bottoms, lambda i: pts[i, 0])
    b_left = pick(bottoms, lambda i: -pts[i, 0])
    t_right = pick(tops, lambda i: pts[i, 0])
    t_left = pick(tops, lambda i: -pts[i, 0])

    def walk(i, j):
        idx = [i]
        while idx[-1] != j:
            idx.append((idx[-1] + 1) % k)
        return pts[idx]

    right = walk(b_right, t_right)
    left = walk(t_left, b_left)[::-1]
    xr = np.interp(ys_c, right[:, 1], right[:, 0])
    xl = np.interp(ys_c, left[:, 1], left[:, 0])
    xmin = np.ceil(xl - _EPS).astype(np.int64)
    xmax = np.floor(xr + _EPS).astype(np.int64)
    return ylo, xmin, xmax


def _disk_rows(region: Region, n: int):
    cx, cy = region.center[0] * n, region.center[1] * n
    rad = region.diameter * n / 2
    r2 = rad * rad
    ylo = _ceil_frac(cy - rad)
    if region.kind == "half-disk":
        ylo = _ceil_frac(cy)
    yhi = _floor_frac(cy + rad)
    xmin, xmax = [], []
    for y in range(ylo, yhi + 1):
        s2 = r2 - (y - cy) ** 2
        half = math.sqrt(max(0.0, float(s2)))
        lo = math.ceil(float(cx) - half)
        hi = math.floor(float(cx) + half)
        # settle float rounding with the exact predicate
        while (lo - cx) ** 2 > s2 and lo <= hi:
            lo += 1
        while lo - 1 >= cx - rad and (lo - 1 - cx) ** 2 <= s2:
            lo -= 1
        while (hi - cx) ** 2 > s2 and hi >= lo:
            hi -= 1
        while hi + 1 <= cx + rad and (hi + 1 - cx) ** 2 <= s2:
            hi += 1
        xmin.append(lo)
        xmax.append(hi)
    return ylo, np.array(xmin, dtype=np.int64), np.array(xmax, dtype=np.int64)


def region_rows(region: Region, n: int):
    """(y_base, xmin, xmax) of the lattice points p with p/n in the region."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if region.is_polygonal:
        if len(region.vertices) <= 64:
            return _polygon_rows_exact(region.vertices, n)
        verts = np.array([[float(x), float(y)] for x, y in region.vertices])
        return _polygon_rows_float(verts, n)
    if region.kind in ("disk", "half-disk"):
        return _disk_rows(region, n)
    return _polygon_rows_float(region.hull_polygon(), n)


def square(side=1, origin=(0, 0), name: str = "") -> Region:
    s = _frac(side)
    ox, oy = _frac(origin[0]), _frac(origin[1])
    return Region("square", ((ox, oy), (ox + s, oy), (ox + s, oy + s), (ox, oy + s)), name=name)


BUILTIN = {
    "R1": Region("parametric-curve", curve="R1", name="R1"),
    "R2": square(1, name="R2"),
    "R3": Region("triangle", ((0, 0), (1, Fraction(3, 4)), (Fraction(2, 5), 1)), name="R3"),
    "R4": Region("half-disk", center=(Fraction(1, 2), 0), diameter=1, name="R4"),
    "R5": Region("disk", center=(Fraction(1, 2), Fraction(1, 2)), diameter=1, name="R5"),
}
ALIASES = {"square": "R2", "triangle": "R3", "half-disk": "R4", "disk": "R5", "curve": "R1"}


def get_region(name: str) -> Region:
    key = ALIASES.get(name, name)
    try:
        return BUILTIN[key]
    except KeyError:
        raise ValueError(f"unknown region {name!r}; known: {sorted(BUILTIN) + sorted(ALIASES)}") from None


def _parse_pair(text: str) -> tuple[Fraction, Fraction]:
    x, y = text.split(",")
    return _frac(x), _frac(y)


def parse_regions(text: str) -> dict[str, Region]:
    """Read regions from INI-style text, one section per region.

    Keys: ``kind``; ``vertices`` as ``x,y; x,y; ...``; ``center`` as
    ``x,y``; ``diameter``; ``side`` and ``origin`` for squares; ``curve``
    for parametric regions. Numbers may be written as fractions (``2/5``).
    """
    cp = configparser.ConfigParser()
    cp.read_string(text)
    out = {}
    for sec in cp.sections():
        kv = cp[sec]
        kind = kv.get("kind", "").strip()
        known = {"kind", "vertices", "center", "diameter", "side", "origin", "curve"}
        extra = set(kv) - known
        if extra:
            raise ValueError(f"region {sec!r}: unknown keys {sorted(extra)}")
        if kind == "square" and "vertices" not in kv:
            origin = _parse_pair(kv.get("origin", "0,0"))
            out[sec] = square(kv.get("side", "1"), origin, name=sec)
            continue
        args = {"name": sec}
        if "vertices" in kv:
            args["vertices"] = tuple(_parse_pair(p) for p in kv["vertices"].split(";") if p.strip())
        if "center" in kv:
            args["center"] = _parse_pair(kv["center"])
        if "diameter" in kv:
            args["diameter"] = _frac(kv["diameter"])
        if "curve" in kv:
            args["curve"] = kv["curve"].strip()
        out[sec] = Region(kind, **args)
    return out


def load_regions(path) -> dict[str, Region]:
    with open(path, encoding="utf-8") as fh:
        return parse_regions(fh.read())

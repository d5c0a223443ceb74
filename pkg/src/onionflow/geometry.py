"""Planar primitives shared by the peeling and flow code.

Integer inputs go through exact orientation tests (Python ints, bounded to
|coord| < 2**31 so every product fits a signed 64-bit word and the numba
kernels agree bit-for-bit). Float inputs use ordinary double arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

COORD_LIMIT = 2**31


class GeometryError(ValueError):
    """Raised on degenerate or invalid geometric input."""


class GridPoint(NamedTuple):
    x: int
    y: int


class FloatPoint(NamedTuple):
    x: float
    y: float


class Straight:
    """Marker returned by :func:`circumcircle` for (near) collinear triples."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Straight"


STRAIGHT = Straight()


@dataclass(frozen=True, eq=False)
class ConvexChain:
    """Strictly convex vertex sequence in counterclockwise order.

    ``closed`` is False for the open staircase chains of the quadrant
    process; everything else in the package is a closed polygon.
    """

    vertices: np.ndarray
    closed: bool = True
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.vertices)
        if v.size == 0:
            v = v.reshape(0, 2)
        if v.ndim != 2 or v.shape[1] != 2:
            raise GeometryError("vertices must be an (k, 2) array")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_key", tuple(map(tuple, v.tolist())))

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexChain):
            return NotImplemented
        return self.closed == other.closed and self._key == other._key

    def __hash__(self) -> int:
        return hash((self.closed, self._key))

    def points(self) -> list[tuple]:
        return list(self._key)

    def vertex_set(self) -> frozenset:
        return frozenset(self._key)


def _check_grid(points) -> list[tuple[int, int]]:
    out = []
    for p in points:
        x, y = int(p[0]), int(p[1])
        if abs(x) >= COORD_LIMIT or abs(y) >= COORD_LIMIT:
            raise GeometryError(f"grid coordinate out of range: {(x, y)}")
        out.append((x, y))
    return out


def orient(o, a, b):
    """Twice the signed area of triangle (o, a, b); > 0 for a left turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(pts: list) -> list:
    # pts sorted lexicographically and deduplicated
    if len(pts) <= 2:
        return list(pts)
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def convex_hull(points: Sequence) -> ConvexChain:
    """Strict convex hull of lattice points by Andrew's monotone chain.

    Collinear boundary points are not reported as vertices. One or two
    distinct input points give a 1- or 2-vertex chain.
    """
    pts = sorted(set(_check_grid(points)))
    if not pts:
        raise GeometryError("convex hull of an empty point set")
    hull = _monotone_chain(pts)
    return ConvexChain(np.array(hull, dtype=np.int64).reshape(-1, 2))


def convex_hull_float(points) -> ConvexChain:
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        raise GeometryError("convex hull of an empty point set")
    uniq = sorted(set(map(tuple, pts.tolist())))
    return ConvexChain(np.array(_monotone_chain(uniq), dtype=float).reshape(-1, 2))


def polygon_area(chain) -> float:
    """Shoelace area of a closed chain (positive for CCW order)."""
    v = np.asarray(chain.vertices if isinstance(chain, ConvexChain) else chain, dtype=float)
    if len(v) < 3:
        raise GeometryError("area needs at least 3 vertices")
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _segments(chain: ConvexChain) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(chain.vertices, dtype=float)
    if len(v) == 1:
        return v, v
    if chain.closed and len(v) > 2:
        return v, np.roll(v, -1, axis=0)
    return v[:-1], v[1:]


def point_segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest of the segments a[j]-b[j]."""
    pts = np.asarray(pts, dtype=float)
    out = np.empty(len(pts))
    d = b - a
    len2 = np.einsum("ij,ij->i", d, d)
    safe = np.where(len2 > 0, len2, 1.0)
    # chunk to bound memory at len(pts) * len(a) floats
    step = max(1, 2_000_000 // max(1, len(a)))
    for s in range(0, len(pts), step):
        p = pts[s : s + step, None, :]
        w = p - a[None, :, :]
        t = np.clip(np.einsum("ijk,jk->ij", w, d) / safe, 0.0, 1.0)
        t = np.where(len2 > 0, t, 0.0)
        diff = w - t[:, :, None] * d[None, :, :]
        out[s : s + step] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).min(axis=1))
    return out


def hausdorff_distance(a: ConvexChain, b: ConvexChain) -> float:
    """Symmetric Hausdorff distance between the boundaries of two convex chains.

    For convex polygonal chains the directed distance is attained at a
    vertex, so it suffices to measure vertices against the other chain's
    segments in both directions.
    """
    if len(a) == 0 or len(b) == 0:
        raise GeometryError("Hausdorff distance of an empty chain")
    sa, ea = _segments(a)
    sb, eb = _segments(b)
    ab = point_segment_distances(np.asarray(a.vertices, dtype=float), sb, eb).max()
    ba = point_segment_distances(np.asarray(b.vertices, dtype=float), sa, ea).max()
    return float(max(ab, ba))


def circumcircle(p, q, r):
    """Center and radius of the circle through three points, or ``STRAIGHT``.

    The triple counts as straight when twice its triangle area falls below
    1e-12 times the squared largest pairwise distance.
    """
    p, q, r = (np.asarray(t, dtype=float) for t in (p, q, r))
    if np.array_equal(p, q) or np.array_equal(q, r) or np.array_equal(p, r):
        raise GeometryError("circumcircle of coincident points")
    b = q - p
    c = r - p
    d = 2.0 * (b[0] * c[1] - b[1] * c[0])
    scale = max(b @ b, c @ c, (r - q) @ (r - q))
    # d is four times the triangle area
    if abs(d) / 2.0 < 1e-12 * scale:
        return STRAIGHT
    b2, c2 = b @ b, c @ c
    ux = (c[1] * b2 - b[1] * c2) / d
    uy = (b[0] * c2 - c[0] * b2) / d
    center = FloatPoint(float(p[0] + ux), float(p[1] + uy))
    return center, float(math.hypot(ux, uy))


@dataclass(frozen=True)
class UnimodularMap:
    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        if abs(self.det) != 1:
            raise GeometryError(f"determinant {self.det} is not +-1")

    @property
    def det(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    def apply(self, p) -> tuple[int, int]:
        x, y = int(p[0]), int(p[1])
        return (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)

    def apply_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
        m = np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=np.int64)
        return pts @ m.T

    def inverse(self) -> "UnimodularMap":
        d = self.det
        return UnimodularMap(d * self.m22, -d * self.m12, -d * self.m21, d * self.m11)

    def compose(self, other: "UnimodularMap") -> "UnimodularMap":
        """Return the map ``self @ other`` (apply ``other`` first)."""
        return UnimodularMap(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def grid_preserving_normalize(v1, v2) -> UnimodularMap:
    """Unimodular map sending v1 to (1, 0) and v2 to slope >= 2 in absolute value.

    The first stage solves p*x1 + q*y1 = 1 and uses rows (p, q), (-y1, x1).
    A horizontal shear (x, y) -> (x - s*y, y) then brings the image of v2
    close to vertical; s is floor or ceil of x2/y2, whichever leaves the
    steeper slope (floor on ties).
    """
    x1, y1 = int(v1[0]), int(v1[1])
    vx, vy = int(v2[0]), int(v2[1])
    if x1 * vy - y1 * vx == 0:
        raise GeometryError("v1 and v2 are linearly dependent")
    g, p, q = _ext_gcd(x1, y1)
    if g < 0:
        g, p, q = -g, -p, -q
    if g != 1:
        raise GeometryError(f"v1 = {(x1, y1)} is not primitive")
    first = UnimodularMap(p, q, -y1, x1)
    x2, y2 = first.apply((vx, vy))
    lo = x2 // y2
    hi = -((-x2) // y2)
    s = lo if abs(x2 - lo * y2) <= abs(x2 - hi * y2) else hi
    return UnimodularMap(1, -s, 0, 1).compose(first)


def diagonal_intersection(chain: ConvexChain) -> float:
    """Coordinate K where the chain boundary first meets the line y = x."""
    v = np.asarray(chain.vertices, dtype=float)
    if len(v) == 0:
        raise GeometryError("empty chain")
    f = v[:, 1] - v[:, 0]
    for i in range(len(v)):
        if f[i] == 0.0:
            return float(v[i, 0])
    a, b = _segments(chain)
    fa = a[:, 1] - a[:, 0]
    fb = b[:, 1] - b[:, 0]
    for j in range(len(a)):
        if fa[j] * fb[j] < 0:
            t = fa[j] / (fa[j] - fb[j])
            return float(a[j, 0] + t * (b[j, 0] - a[j, 0]))
    raise GeometryError("chain does not cross the diagonal y = x")

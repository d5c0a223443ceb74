"""Front-tracking simulation of the affine curve-shortening flow.

Each sample moves toward the center of the circle through itself and its
two neighbours with speed r**(-1/3), plus a tangential term that pushes it
toward its farther neighbour to keep the spacing even. The time step is
c_step * d_min**(4/3), which makes the scheme scale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .regions import Region, resample_closed

MAX_SPEED_STEP = 0.4  # cap on per-step displacement, in units of d_min
RESAMPLE_RATIO = 10.0
STRAIGHT_TOL = 1e-12


class StepRejected(RuntimeError):
    """The step would invert or tangle the curve; retry with a smaller c_step."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepParams:
    c_step: float = 0.02
    lam: float = 0.5

    def __post_init__(self):
        if not self.c_step > 0:
            raise ValueError("c_step must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")


def signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True, eq=False)
class FrontCurve:
    points: np.ndarray
    elapsed_time: float = 0.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 8:
            raise ValueError("a front curve needs at least 8 points in an (m, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("front curve has non-finite coordinates")
        if signed_area(pts) < 0:
            pts = pts[::-1].copy()
        if spacing(pts).min() <= 0:
            raise ValueError("consecutive samples coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def area(self) -> float:
        return signed_area(self.points)

    def is_convex(self, rel_tol: float = 1e-9) -> bool:
        """True when no sample sits more than rel_tol * diameter inside the hull edge it skips."""
        p = self.points
        prev, nxt = np.roll(p, 1, axis=0), np.roll(p, -1, axis=0)
        chord = nxt - prev
        cross = chord[:, 0] * (p[:, 1] - prev[:, 1]) - chord[:, 1] * (p[:, 0] - prev[:, 0])
        depth = cross / np.maximum(np.hypot(chord[:, 0], chord[:, 1]), 1e-300)
        diam = float(np.ptp(p, axis=0).max())
        # for a CCW convex curve each sample lies right of (outside) its neighbours' chord
        return bool(np.all(depth <= rel_tol * diam))

    def radii(self, center=None) -> np.ndarray:
        c = self.points.mean(axis=0) if center is None else np.asarray(center, dtype=float)
        return np.hypot(*(self.points - c).T)


def spacing(pts: np.ndarray) -> np.ndarray:
    """Distance from each sample to the next one."""
    d = np.roll(pts, -1, axis=0) - pts
    return np.hypot(d[:, 0], d[:, 1])


def velocities(pts: np.ndarray, lam: float) -> np.ndarray:
    """Normal plus tangential velocity of every sample (straight triples stay put)."""
    prev, nxt = np.roll(pts, 1, axis=0), np.roll(pts, -1, axis=0)
    b = prev - pts
    c = nxt - pts
    cross = b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]
    b2 = np.einsum("ij,ij->i", b, b)
    c2 = np.einsum("ij,ij->i", c, c)
    bc = nxt - prev
    scale = np.maximum(np.maximum(b2, c2), np.einsum("ij,ij->i", bc, bc))
    # |cross| is twice the triangle area
    straight = np.abs(cross) < STRAIGHT_TOL * scale
    d = np.where(straight, 1.0, 2.0 * cross)
    ux = (c[:, 1] * b2 - b[:, 1] * c2) / d
    uy = (b[:, 0] * c2 - c[:, 0] * b2) / d
    r = np.hypot(ux, uy)
    r = np.where(straight, 1.0, r)
    speed = np.where(straight, 0.0, r ** (-1.0 / 3.0))
    normal = np.column_stack([ux, uy]) / r[:, None]
    v = normal * speed[:, None]
    if lam == 0:
        return v
    d_prev, d_next = np.sqrt(b2), np.sqrt(c2)
    # tangent perpendicular to the normal, oriented toward the farther neighbour
    tang = np.column_stack([-normal[:, 1], normal[:, 0]])
    toward_next = np.sign(np.einsum("ij,ij->i", tang, c))
    toward_prev = np.sign(np.einsum("ij,ij->i", tang, b))
    sign = np.where(d_prev < d_next, toward_next, toward_prev)
    mag = lam * speed * np.abs(np.log(d_prev / d_next))
    return v + tang * (sign * mag)[:, None]


def _advance(pts: np.ndarray, params: StepParams) -> tuple[np.ndarray, float]:
    new, dt, area, turn, gmin, gmax = _kernels.flow_step(
        pts, params.c_step, params.lam, MAX_SPEED_STEP, STRAIGHT_TOL
    )
    if not area > 0 or round(turn) != 1 or not np.isfinite(area):
        raise StepRejected(f"step of size {dt:.3g} tangles the front")
    # near-flat samples move at curvature^(1/3), far faster than their bend, and overshoot
    if _kernels.convexify(new):
        g = spacing(new)
        gmin, gmax = g.min(), g.max()
    if gmin <= 0 or gmax > RESAMPLE_RATIO * gmin:
        new = resample_closed(new, len(new))
    return new, dt


def acsf_step(curve: FrontCurve, params: StepParams) -> FrontCurve:
    """Advance every sample simultaneously by one time step.

    Raises StepRejected if the result would lose positive area or stop
    winding once around its interior.
    """
    new, dt = _advance(curve.points, params)
    return FrontCurve(new, curve.elapsed_time + dt)


def _advance_with_retry(pts: np.ndarray, params: StepParams, retries: int = 30):
    p = params
    for _ in range(retries):
        try:
            return _advance(pts, p)
        except StepRejected:
            p = replace(p, c_step=p.c_step / 2)
    raise ConvergenceError("step rejected even after repeated halving of c_step")


def check_convex_input(curve: FrontCurve) -> None:
    if not curve.is_convex(1e-9):
        raise ValueError("the flow simulator only accepts convex curves")


def run_until_area(
    curve: FrontCurve, target_fraction: float, params: StepParams = StepParams(), max_steps: int = 5_000_000
) -> tuple[FrontCurve, float]:
    """Flow until the enclosed area first drops to ``target_fraction`` of its start.

    Returns the curve at that step and the flow time elapsed since the input.
    """
    (_, cur, t), = run_to_fractions(curve, [target_fraction], params, max_steps)
    return cur, t


def run_to_fractions(curve: FrontCurve, fractions, params: StepParams = StepParams(), max_steps: int = 5_000_000):
    """Flow once through several area fractions of the input curve.

    Returns [(fraction, curve, t)] in the order given; each entry is the
    first step at which area <= fraction * initial area.
    """
    fr = list(fractions)
    if not fr or not all(0 < f < 1 for f in fr):
        raise ValueError("target fractions must lie strictly between 0 and 1")
    check_convex_input(curve)
    pts = np.array(curve.points)
    base = curve.area
    t = 0.0
    hits = {}
    pending = sorted(set(fr), reverse=True)
    for _ in range(max_steps):
        if not pending:
            break
        pts, dt = _advance_with_retry(pts, params)
        t += dt
        area = signed_area(pts)
        while pending and area <= pending[0] * base:
            hits[pending.pop(0)] = (FrontCurve(pts, curve.elapsed_time + t), t)
    if pending:
        raise ConvergenceError(f"area target not reached within {max_steps} steps")
    return [(f, *hits[f]) for f in fr]


def circle_radius(r0: float, t: float) -> float:
    """Radius at flow time t of a circle that starts with radius r0."""
    collapse = 0.75 * r0 ** (4.0 / 3.0)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t > collapse:
        raise ValueError(f"circle of radius {r0} collapses at t = {collapse}")
    return max(0.0, r0 ** (4.0 / 3.0) - 4.0 * t / 3.0) ** 0.75


def circle_time_to_area(r0: float, fraction: float) -> float:
    """Flow time at which a circle's area has shrunk to ``fraction`` of its start."""
    return 0.75 * r0 ** (4.0 / 3.0) * (1.0 - fraction ** (2.0 / 3.0))


def sample_region_boundary(region: Region, m: int) -> FrontCurve:
    if m < 8:
        raise ValueError("need at least 8 samples")
    return FrontCurve(region.boundary(m))


def circle_curve(r: float, m: int, center=(0.0, 0.0)) -> FrontCurve:
    t = 2 * math.pi * np.arange(m) / m
    return FrontCurve(np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)]))

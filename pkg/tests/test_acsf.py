import math

import numpy as np
import pytest

from onionflow import _kernels
from onionflow.acsf import (
    MAX_SPEED_STEP,
    STRAIGHT_TOL,
    ConvergenceError,
    FrontCurve,
    StepParams,
    acsf_step,
    circle_curve,
    circle_radius,
    circle_time_to_area,
    run_to_fractions,
    run_until_area,
    sample_region_boundary,
    velocities,
)
from onionflow.regions import get_region, square

P = StepParams()


def superellipse(m: int, p: float = 4.0, ax: float = 2.0) -> np.ndarray:
    t = 2 * np.pi * np.arange(m) / m
    c, s = np.cos(t), np.sin(t)
    return np.column_stack([ax * np.sign(c) * np.abs(c) ** (2 / p), np.sign(s) * np.abs(s) ** (2 / p)])


def ellipse_misfit(pts: np.ndarray) -> tuple[float, float]:
    """(relative radial spread after whitening by the area moments, aspect ratio).

    A solid ellipse whitens to a disk, so the spread is zero exactly for ellipses.
    """
    x, y = pts[:, 0], pts[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cr = x * y1 - x1 * y
    A = cr.sum() / 2
    cx, cy = ((x + x1) * cr).sum() / (6 * A), ((y + y1) * cr).sum() / (6 * A)
    q = pts - [cx, cy]
    x, y = q[:, 0], q[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cr = x * y1 - x1 * y
    ixx = ((x * x + x * x1 + x1 * x1) * cr).sum() / 12
    iyy = ((y * y + y * y1 + y1 * y1) * cr).sum() / 12
    ixy = ((x * y1 + 2 * x * y + 2 * x1 * y1 + x1 * y) * cr).sum() / 24
    w, V = np.linalg.eigh(np.array([[ixx, ixy], [ixy, iyy]]) / A)
    r = np.hypot(*(q @ (V @ np.diag(w**-0.5) @ V.T).T).T)
    return float((r.max() - r.min()) / r.mean()), float(math.sqrt(w[1] / w[0]))


def test_circle_step_is_uniform():
    c = circle_curve(1.0, 1024)
    nxt = acsf_step(c, P)
    dt = nxt.elapsed_time
    move = np.hypot(*(nxt.points - c.points).T)
    assert np.allclose(move / dt, 1.0, rtol=1e-4)
    assert np.all(nxt.radii((0, 0)) < 1.0)


def test_equidistant_samples_have_no_tangential_speed():
    pts = np.asarray(circle_curve(0.7, 300).points)
    assert np.allclose(velocities(pts, 0.5), velocities(pts, 0.0), atol=1e-12)


def test_tangential_term_points_toward_farther_neighbour():
    u = 2 * np.pi * np.arange(64) / 64
    th = u + 0.3 * np.sin(u)
    pts = np.column_stack([np.cos(th), np.sin(th)])
    tang = velocities(pts, 0.5) - velocities(pts, 0.0)
    prev, nxt = np.roll(pts, 1, axis=0), np.roll(pts, -1, axis=0)
    d_prev, d_next = np.hypot(*(prev - pts).T), np.hypot(*(nxt - pts).T)
    far = np.where((d_next > d_prev)[:, None], nxt - pts, prev - pts)
    moving = np.hypot(*tang.T) > 1e-12
    assert moving.sum() > 50
    assert np.all(np.einsum("ij,ij->i", tang, far)[moving] > 0)


def test_kernel_matches_numpy_velocities():
    pts = superellipse(200, 3.0)
    pts[::7] *= 1.0 + 1e-3  # irregular spacing so the tangential term is active
    new, dt, area, turn, gmin, gmax = _kernels.flow_step(pts, 0.02, 0.5, MAX_SPEED_STEP, STRAIGHT_TOL)
    assert np.allclose((new - pts) / dt, velocities(pts, 0.5), rtol=1e-10, atol=1e-12)
    assert round(turn) == 1 and area > 0


def test_straight_triples_do_not_move():
    s = FrontCurve(square().boundary(64))
    v = velocities(np.asarray(s.points), 0.5)
    corners = {(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}
    for p, vi in zip(s.points, v):
        if tuple(p) not in corners:
            assert np.all(vi == 0)


def test_displacement_cap_at_corners():
    s = FrontCurve(square().boundary(64))
    nxt = acsf_step(s, StepParams(c_step=10.0))
    d_min = np.hypot(*np.diff(np.vstack([s.points, s.points[:1]]), axis=0).T).min()
    assert np.hypot(*(nxt.points - s.points).T).max() <= MAX_SPEED_STEP * d_min * (1 + 1e-12)


def test_circle_closed_form_time():
    c = circle_curve(0.5, 512)
    cur, t = run_until_area(c, 0.75, P)
    assert t == pytest.approx(circle_time_to_area(0.5, 0.75), rel=0.01)
    r = cur.radii((0, 0))
    assert r.max() / r.min() < 1.005


def test_tangential_neutrality():
    u = 2 * np.pi * np.arange(256) / 256
    th = u + 0.3 * np.sin(u)
    c = FrontCurve(0.5 * np.column_stack([np.cos(th), np.sin(th)]))
    t0 = run_until_area(c, 0.75, StepParams(lam=0.0))[1]
    t1 = run_until_area(c, 0.75, StepParams(lam=0.5))[1]
    assert abs(t1 - t0) / t0 < 0.005


def test_circle_fidelity_over_many_steps():
    c = circle_curve(0.5, 1024)
    for _ in range(1000):
        c = acsf_step(c, P)
        r = c.radii((0, 0))
        assert r.max() / r.min() < 1.005


def test_dilation_scales_time():
    t1 = run_until_area(FrontCurve(superellipse(256)), 0.75, P)[1]
    t2 = run_until_area(FrontCurve(2 * superellipse(256)), 0.75, P)[1]
    assert t2 / t1 == pytest.approx(2 ** (4 / 3), rel=0.01)


def test_area_preserving_shear_keeps_time():
    base = superellipse(256)
    shear = np.array([[1.0, 0.7], [0.0, 1.0]])
    t1 = run_until_area(FrontCurve(base), 0.75, P)[1]
    t2 = run_until_area(FrontCurve(base @ shear.T), 0.75, P)[1]
    assert t2 / t1 == pytest.approx(1.0, rel=0.01)


def test_area_decreases_on_square():
    c = sample_region_boundary(get_region("R2"), 128)
    a = c.area
    for _ in range(300):
        c = acsf_step(c, P)
        assert c.area < a
        a = c.area


@pytest.mark.parametrize("start", ["superellipse", "R2", "R3", "R4"])
def test_convexity_preserved(start):
    if start == "superellipse":
        c = FrontCurve(superellipse(256, 3.0))
    else:
        c = sample_region_boundary(get_region(start), 256)
    for _ in range(1500):
        c = acsf_step(c, P)
        assert c.is_convex(1e-9)


def test_ellipse_keeps_its_shape():
    res = run_to_fractions(FrontCurve(superellipse(256, 2.0)), [0.5, 0.2], P)
    for _, cur, _ in res:
        spread, aspect = ellipse_misfit(np.asarray(cur.points))
        assert spread < 1e-3 and aspect == pytest.approx(2.0, rel=0.01)


def test_flow_rounds_toward_an_ellipse():
    c = FrontCurve(superellipse(256))
    dist = [ellipse_misfit(np.asarray(c.points))[0]]
    for _, cur, _ in run_to_fractions(c, [0.9, 0.6, 0.3], P):
        dist.append(ellipse_misfit(np.asarray(cur.points))[0])
    assert all(b < a for a, b in zip(dist, dist[1:]))


def test_fraction_near_one_gives_small_time():
    c = circle_curve(0.5, 256)
    t = run_until_area(c, 0.9999, P)[1]
    assert 0 < t < 1e-4


def test_run_rejects_bad_inputs():
    c = circle_curve(0.5, 64)
    with pytest.raises(ValueError):
        run_until_area(c, 1.0, P)
    dent = np.asarray(c.points).copy()
    dent[5] *= 0.8
    with pytest.raises(ValueError):
        run_until_area(FrontCurve(dent), 0.5, P)
    with pytest.raises(ConvergenceError):
        run_until_area(c, 0.5, P, max_steps=3)


def test_front_curve_validation():
    with pytest.raises(ValueError):
        FrontCurve(np.zeros((7, 2)))
    pts = np.asarray(circle_curve(1.0, 16).points).copy()
    pts[3] = pts[2]
    with pytest.raises(ValueError):
        FrontCurve(pts)
    pts[3] = np.nan
    with pytest.raises(ValueError):
        FrontCurve(pts)
    cw = FrontCurve(np.asarray(circle_curve(1.0, 16).points)[::-1])
    assert cw.area > 0


def test_step_params_validation():
    with pytest.raises(ValueError):
        StepParams(c_step=0)
    with pytest.raises(ValueError):
        StepParams(lam=-1)


def test_circle_radius_examples():
    assert circle_radius(0.5, 0) == 0.5
    assert circle_radius(1.0, 0.75) == 0.0
    t = 0.75 * 0.5 ** (4 / 3) * (1 - 0.75 ** (2 / 3))
    assert circle_radius(0.5, t) == pytest.approx(0.5 * math.sqrt(0.75))
    assert circle_time_to_area(0.5, 0.75) == pytest.approx(t)
    with pytest.raises(ValueError, match="collapses"):
        circle_radius(1.0, 0.76)


def test_sample_square_eight_points():
    c = sample_region_boundary(square(), 8)
    assert {tuple(p) for p in c.points} == {
        (0, 0), (0.5, 0), (1, 0), (1, 0.5), (1, 1), (0.5, 1), (0, 1), (0, 0.5)
    }


def test_sample_disk_chord_deviation():
    m = 2000
    c = sample_region_boundary(get_region("R5"), m)
    r = c.radii((0.5, 0.5))
    mid = (c.points + np.roll(c.points, -1, axis=0)) / 2
    rm = np.hypot(*(mid - 0.5).T)
    bound = (math.pi / m) ** 2 / 2 * 0.5
    assert np.abs(r - 0.5).max() < 1e-12
    assert np.abs(rm - 0.5).max() <= bound * (1 + 1e-6)


def test_sample_parametric_region_is_valid():
    c = sample_region_boundary(get_region("R1"), 2048)
    assert len(c) == 2048 and c.area > 0
    assert c.is_convex(1e-9)
    e = np.diff(np.vstack([c.points, c.points[:1]]), axis=0)
    turn = np.arctan2(e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1),
                      np.einsum("ij,ij->i", e, np.roll(e, -1, axis=0))).sum()
    assert round(turn / (2 * math.pi)) == 1  # convex with one turn: simple
    with pytest.raises(ValueError):
        sample_region_boundary(get_region("R1"), 7)

"""Compiled inner loops: row-interval peeling, quadrant peeling, flow steps.

The peeling kernels mirror the pure-Python paths exactly (int64 arithmetic,
overflow-free under the coordinate limit); ``flow_step`` repeats the numpy
velocity formula of ``acsf.velocities``. Tests check each pair against the
other.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@njit(cache=True)
def hull_rows(xmin, xmax, y_base, lo, hi):
    """Strict CCW hull of the row extremes of rows lo..hi (inclusive).

    Points are generated in (y, x) lexicographic order, so the monotone
    chain runs directly on the swapped coordinates without sorting.
    """
    cap = 2 * (hi - lo + 1) + 2
    us = np.empty(cap, np.int64)
    vs = np.empty(cap, np.int64)
    k = 0
    for r in range(lo, hi + 1):
        if xmin[r] > xmax[r]:
            continue
        us[k] = y_base + r
        vs[k] = xmin[r]
        k += 1
        if xmax[r] != xmin[r]:
            us[k] = y_base + r
            vs[k] = xmax[r]
            k += 1
    hu = np.empty(2 * k + 2, np.int64)
    hv = np.empty(2 * k + 2, np.int64)
    if k <= 2:
        out = np.empty((k, 2), np.int64)
        for i in range(k):
            out[i, 0] = vs[i]
            out[i, 1] = us[i]
        return out
    h = 0
    for i in range(k):
        while h >= 2 and _cross(hu[h - 2], hv[h - 2], hu[h - 1], hv[h - 1], us[i], vs[i]) <= 0:
            h -= 1
        hu[h] = us[i]
        hv[h] = vs[i]
        h += 1
    base = h + 1
    for i in range(k - 2, -1, -1):
        while h >= base and _cross(hu[h - 2], hv[h - 2], hu[h - 1], hv[h - 1], us[i], vs[i]) <= 0:
            h -= 1
        hu[h] = us[i]
        hv[h] = vs[i]
        h += 1
    h -= 1
    # CCW in (y, x) is CW in (x, y): emit reversed
    out = np.empty((h, 2), np.int64)
    for i in range(h):
        out[i, 0] = hv[h - 1 - i]
        out[i, 1] = hu[h - 1 - i]
    return out


@njit(cache=True)
def remove_vertices(xmin, xmax, y_base, verts):
    for i in range(verts.shape[0]):
        x = verts[i, 0]
        r = verts[i, 1] - y_base
        if xmin[r] == x:
            xmin[r] += 1
        elif xmax[r] == x:
            xmax[r] -= 1
        else:
            raise ValueError("hull vertex is not a row extreme")


@njit(cache=True)
def peel_to_count(xmin, xmax, y_base, lo, hi, remaining, stop_at, max_steps, sizes):
    """Peel until ``remaining <= stop_at`` or the set is empty.

    Layer sizes are written to ``sizes``; returns (steps, remaining, lo, hi).
    """
    steps = 0
    while remaining > stop_at and lo <= hi and steps < max_steps:
        verts = hull_rows(xmin, xmax, y_base, lo, hi)
        remove_vertices(xmin, xmax, y_base, verts)
        sizes[steps] = verts.shape[0]
        remaining -= verts.shape[0]
        steps += 1
        while lo <= hi and xmin[lo] > xmax[lo]:
            lo += 1
        while hi >= lo and xmin[hi] > xmax[hi]:
            hi -= 1
    return steps, remaining, lo, hi


@njit(cache=True)
def staircase_vertices(a, x_end, cx, cy, hx, hy):
    """Columns of the strict vertices of the lower-left chain of {(x, a[x])}.

    Only the first column of each run of equal heights can be a vertex, so
    the candidates are the run starts up to and including ``x_end``.
    Returns the vertex count; vertex columns are in ``hx[:count]``.
    """
    k = 0
    for x in range(x_end + 1):
        if x == 0 or a[x] != a[x - 1]:
            cx[k] = x
            cy[k] = a[x]
            k += 1
    h = 0
    for i in range(k):
        while h >= 2 and _cross(hx[h - 2], hy[h - 2], hx[h - 1], hy[h - 1], cx[i], cy[i]) <= 0:
            h -= 1
        hx[h] = cx[i]
        hy[h] = cy[i]
        h += 1
    return h


@njit(cache=True)
def quadrant_advance(a, x_end, steps, sizes, offset):
    """Run ``steps`` peeling iterations of N^2 on the column profile ``a``.

    ``a`` must have room for column ``x_end + steps``. Returns the new x_end.
    """
    n = a.shape[0]
    cx = np.empty(n, np.int64)
    cy = np.empty(n, np.int64)
    hx = np.empty(n, np.int64)
    hy = np.empty(n, np.int64)
    for s in range(steps):
        h = staircase_vertices(a, x_end, cx, cy, hx, hy)
        for i in range(h):
            a[hx[i]] += 1
        sizes[offset + s] = h
        while a[x_end] != 0:
            x_end += 1
    return x_end


@njit(cache=True)
def flow_step(pts, c_step, lam, cap, straight_tol):
    """One front-tracking step; same arithmetic as ``acsf.velocities``.

    Returns (new_points, dt, new_area, turning_number, min_gap, max_gap).
    """
    m = pts.shape[0]
    vel = np.zeros((m, 2))
    d_min = np.inf
    for i in range(m):
        j = (i + 1) % m
        g = np.hypot(pts[j, 0] - pts[i, 0], pts[j, 1] - pts[i, 1])
        if g < d_min:
            d_min = g
    vmax = 0.0
    for i in range(m):
        ip = (i - 1) % m
        jn = (i + 1) % m
        bx = pts[ip, 0] - pts[i, 0]
        by = pts[ip, 1] - pts[i, 1]
        cx = pts[jn, 0] - pts[i, 0]
        cy = pts[jn, 1] - pts[i, 1]
        cross = bx * cy - by * cx
        b2 = bx * bx + by * by
        c2 = cx * cx + cy * cy
        ex = pts[jn, 0] - pts[ip, 0]
        ey = pts[jn, 1] - pts[ip, 1]
        scale = max(max(b2, c2), ex * ex + ey * ey)
        if abs(cross) < straight_tol * scale:
            continue
        d = 2.0 * cross
        ux = (cy * b2 - by * c2) / d
        uy = (bx * c2 - cx * b2) / d
        r = np.hypot(ux, uy)
        speed = r ** (-1.0 / 3.0)
        nx = ux / r
        ny = uy / r
        vx = nx * speed
        vy = ny * speed
        if lam != 0.0:
            tx = -ny
            ty = nx
            d_prev = np.sqrt(b2)
            d_next = np.sqrt(c2)
            if d_prev < d_next:
                s = np.sign(tx * cx + ty * cy)
            else:
                s = np.sign(tx * bx + ty * by)
            mag = lam * speed * abs(np.log(d_prev / d_next))
            vx += tx * s * mag
            vy += ty * s * mag
        vel[i, 0] = vx
        vel[i, 1] = vy
        vn = np.hypot(vx, vy)
        if vn > vmax:
            vmax = vn
    dt = c_step * d_min ** (4.0 / 3.0)
    if vmax * dt > cap * d_min:
        dt = cap * d_min / vmax
    new = pts + dt * vel
    area = 0.0
    turn = 0.0
    gmin = np.inf
    gmax = 0.0
    for i in range(m):
        j = (i + 1) % m
        k = (i + 2) % m
        area += new[i, 0] * new[j, 1] - new[j, 0] * new[i, 1]
        e1x = new[j, 0] - new[i, 0]
        e1y = new[j, 1] - new[i, 1]
        e2x = new[k, 0] - new[j, 0]
        e2y = new[k, 1] - new[j, 1]
        turn += np.arctan2(e1x * e2y - e1y * e2x, e1x * e2x + e1y * e2y)
        g = np.hypot(e1x, e1y)
        if g < gmin:
            gmin = g
        if g > gmax:
            gmax = g
    return new, dt, 0.5 * area, turn / (2.0 * np.pi), gmin, gmax


@njit(cache=True)
def convexify(pts):
    """Project samples that dent inward onto the hull edge spanning them.

    Assumes a simple CCW curve. Returns the number of samples moved; ``pts``
    is updated in place. Collinear samples are left alone.
    """
    m = pts.shape[0]
    start = 0
    for i in range(1, m):
        if pts[i, 0] < pts[start, 0] or (pts[i, 0] == pts[start, 0] and pts[i, 1] < pts[start, 1]):
            start = i
    stack = np.empty(m + 1, dtype=np.int64)
    top = 0
    for k in range(m + 1):
        i = (start + k) % m
        while top >= 2:
            a = stack[top - 2]
            b = stack[top - 1]
            if _cross(pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1], pts[i, 0], pts[i, 1]) < 0.0:
                top -= 1
            else:
                break
        stack[top] = i
        top += 1
    moved = m + 1 - top
    if moved == 0:
        return 0
    for s in range(top - 1):
        a = stack[s]
        b = stack[s + 1]
        ex = pts[b, 0] - pts[a, 0]
        ey = pts[b, 1] - pts[a, 1]
        ee = ex * ex + ey * ey
        j = (a + 1) % m
        while j != b:
            t = ((pts[j, 0] - pts[a, 0]) * ex + (pts[j, 1] - pts[a, 1]) * ey) / ee
            t = min(max(t, 0.0), 1.0)
            pts[j, 0] = pts[a, 0] + t * ex
            pts[j, 1] = pts[a, 1] + t * ey
            j = (j + 1) % m
    return moved

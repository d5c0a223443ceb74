"""Plain-text writers: CSV tables, (x, a[x]) dumps, SVG polyline overlays."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(v) -> str:
    """Locale-free rendering; floats use the shortest round-trip repr."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:] if line]


def write_profile(path, a: np.ndarray, x_end: int) -> Path:
    """Dump profile columns 0..x_end as 'x a[x]' lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for x in range(x_end + 1):
            fh.write(f"{x} {int(a[x])}\n")
    return path


def _polyline(pts: np.ndarray, closed: bool, flip: float, scale: float, pad: float) -> str:
    pts = np.asarray(pts, dtype=float)
    if closed and len(pts) > 2:
        pts = np.vstack([pts, pts[:1]])
    coords = " ".join(f"{pad + x * scale:.6f},{pad + (flip - y) * scale:.6f}" for x, y in pts)
    return f'<polyline points="{coords}"/>'


def write_svg(path, groups: dict[str, list], size: float = 600.0, closed: bool = True) -> Path:
    """One <g> per named group of polylines, y axis pointing up.

    ``groups`` maps a group id to a list of (k, 2) point arrays; colours
    cycle per group.
    """
    colours = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"]
    every = [np.asarray(p, dtype=float) for ps in groups.values() for p in ps if len(p)]
    allpts = np.vstack(every) if every else np.zeros((1, 2))
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 10.0
    scale = (size - 2 * pad) / span
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.6f}" height="{size:.6f}" '
        f'viewBox="0 0 {size:.6f} {size:.6f}">'
    ]
    for i, (gid, polys) in enumerate(groups.items()):
        out.append(f'<g id="{gid}" fill="none" stroke="{colours[i % len(colours)]}" stroke-width="0.8">')
        for p in polys:
            if len(p):
                shifted = np.asarray(p, dtype=float) - [lo[0], 0.0]
                out.append(_polyline(shifted, closed, float(hi[1]), scale, pad))
        out.append("</g>")
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(out) + "\n")
    return path


def thread_cap(default: int = 1) -> int:
    """Worker cap from ONIONFLOW_THREADS (at least 1)."""
    raw = os.environ.get("ONIONFLOW_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return default

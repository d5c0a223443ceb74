import math

import numpy as np
import pytest

from onionflow import harness
from onionflow.acsf import StepParams, circle_radius, circle_time_to_area
from onionflow.export import read_csv
from onionflow.harness import (
    COMPARISON_HEADER,
    compare_experiment,
    compare_many,
    estimate_c,
    quadrant_experiment,
    write_comparison_csv,
    write_quadrant_csv,
)
from onionflow.regions import get_region

FAST = StepParams(c_step=0.02, lam=0.5)


def test_estimate_c_examples():
    assert estimate_c(16, 1.0, 8) == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        c, t, n = rng.uniform(0.5, 3), rng.uniform(0.01, 1), int(rng.integers(1, 10_000))
        assert estimate_c(c * t * n ** (4 / 3), t, n) == pytest.approx(c, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_c(5, 0.0, 10)
    with pytest.raises(ValueError):
        estimate_c(5, 1.0, 0)


def test_disk_uses_closed_form():
    recs = compare_experiment(get_region("R5"), 200, [0.9, 0.75])
    for r in recs:
        assert r.t_flow == circle_time_to_area(0.5, r.fraction)
    ref = harness.flow_reference(get_region("R5"), (0.9,))
    (_, pts, t), = ref
    assert np.allclose(np.hypot(*(pts - 0.5).T), circle_radius(0.5, t))


def test_fraction_near_one_stays_near_initial():
    n = 400
    (r,) = compare_experiment(get_region("R2"), n, [0.9999], 256, FAST)
    assert abs(r.hausdorff - r.initial_hausdorff) < 2 / n


def test_records_recompute_c_and_keep_order():
    fr = [0.8, 0.95, 0.9]
    recs = compare_experiment(get_region("R3"), 150, fr, 256, FAST)
    assert [r.fraction for r in recs] == fr
    for r in recs:
        assert r.c_est == estimate_c(r.m_layers, r.t_flow, r.n)
        assert r.region == "R3" and r.hausdorff >= 0 and r.initial_hausdorff >= 0
    by_f = sorted(recs, key=lambda r: -r.fraction)
    assert [r.m_layers for r in by_f] == sorted(r.m_layers for r in recs)


def test_bad_fractions():
    with pytest.raises(ValueError):
        compare_experiment(get_region("R5"), 50, [1.0])


def test_records_are_deterministic(tmp_path):
    args = ([get_region("R2"), get_region("R5")], [100, 150], [0.95, 0.8], 128, FAST)
    a = compare_many(*args, workers=1)
    harness.flow_reference.cache_clear()
    b = compare_many(*args, workers=2)
    assert a == b
    write_comparison_csv(tmp_path / "a.csv", a)
    write_comparison_csv(tmp_path / "b.csv", b)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert [(r.region, r.n, r.fraction) for r in a] == sorted(
        ((r.region, r.n, r.fraction) for r in a), key=lambda k: (k[0], k[1], -k[2])
    )


def test_comparison_csv_header(tmp_path):
    recs = compare_experiment(get_region("R5"), 60, [0.9])
    path = write_comparison_csv(tmp_path / "c.csv", recs)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(COMPARISON_HEADER)
    assert "\r" not in text
    row = read_csv(path)[0]
    assert float(row["c_est"]) == recs[0].c_est


def test_quadrant_experiment_rows(tmp_path):
    alphas = [0.01, 0.1, 0.03]
    rows = quadrant_experiment([1000, 10_000], alphas)
    assert len(rows) == 6
    for n in (1000, 10_000):
        sub = {r.alpha: r for r in rows if r.n == n}
        ratios = [sub[a].ratio for a in sorted(alphas)]
        assert ratios == sorted(ratios)
        assert len({r.c_est for r in sub.values()}) == 1
    big = {r.alpha: r for r in rows if r.n == 10_000}
    assert big[0.1].ratio > 1
    assert 1.4 <= big[0.1].c_est <= 1.8
    path = write_quadrant_csv(tmp_path / "q.csv", rows)
    assert path.read_text().splitlines()[0] == "n,alpha,K_n,x_alpha,ratio,saturated,c_est"


def test_quadrant_ratio_grows_with_n():
    rows = quadrant_experiment([1000, 3000, 10_000], [0.1])
    ratios = [r.ratio for r in sorted(rows, key=lambda r: r.n)]
    assert ratios == sorted(ratios)
    assert math.isfinite(ratios[-1])

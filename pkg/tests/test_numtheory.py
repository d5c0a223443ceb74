import math

import numpy as np
import pytest

from onionflow.geometry import ConvexChain
from onionflow.numtheory import (
    LatticeRect,
    jarnik_ratio,
    mobius,
    mobius_table,
    primitive_count_anchored,
    primitive_count_rect,
)
from onionflow.peeling import RowIntervalSet, iter_layers


def brute_rect(a, b, m, n) -> int:
    x = np.arange(a + 1, a + m + 1)[:, None]
    y = np.arange(b + 1, b + n + 1)[None, :]
    return int((np.gcd(x, y) == 1).sum())


@pytest.mark.parametrize("k,mu", [(1, 1), (2, -1), (4, 0), (6, 1), (30, -1), (49, 0), (1_000_003, -1), (2 * 1_000_003, 1)])
def test_mobius_examples(k, mu):
    assert mobius(k) == mu


def test_mobius_zero():
    with pytest.raises(ValueError):
        mobius(0)


def test_mobius_divisor_sum():
    mu = mobius_table(10_000)
    total = np.zeros(10_001, dtype=np.int64)
    for d in range(1, 10_001):
        total[d::d] += mu[d]
    assert total[1] == 1 and not total[2:].any()


def test_mobius_table_matches_factorization():
    mu = mobius_table(3000)
    assert [int(v) for v in mu[1:]] == [mobius(k) for k in range(1, 3001)]


def test_anchored_examples():
    assert primitive_count_anchored(1, 1) == 1
    assert primitive_count_anchored(2, 2) == 3
    assert primitive_count_anchored(0, 5) == 0
    assert primitive_count_anchored(1000, 1000) / 1e6 == pytest.approx(6 / math.pi**2, abs=0.01)
    assert primitive_count_anchored(1000, 1000) == brute_rect(0, 0, 1000, 1000)


def test_anchored_overflow_guard():
    with pytest.raises(OverflowError):
        primitive_count_anchored(2**31, 2**32)


def test_anchored_symmetry_and_error_term():
    rng = np.random.default_rng(9)
    for _ in range(200):
        m, n = (int(v) for v in rng.integers(1, 2001, 2))
        rho = primitive_count_anchored(m, n)
        assert rho == primitive_count_anchored(n, m)
        top = max(m, n)
        assert abs(rho - 6 / math.pi**2 * m * n) <= 10 * top * math.log(top + 1)


def test_rect_examples():
    assert primitive_count_rect(LatticeRect(1, 0, 2, 2)) == brute_rect(1, 0, 2, 2) == 3
    assert primitive_count_rect(LatticeRect(1, 1, 1, 1)) == 0


def test_rect_matches_gcd_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(50):
        a, b = (int(v) for v in rng.integers(0, 999, 2))
        m = int(rng.integers(1, 1000 - a + 1))
        n = int(rng.integers(1, 1000 - b + 1))
        assert primitive_count_rect(LatticeRect(a, b, m, n)) == brute_rect(a, b, m, n)


def test_rect_validation():
    with pytest.raises(ValueError):
        LatticeRect(0, 0, 0, 3)
    with pytest.raises(ValueError):
        LatticeRect(-1, 0, 1, 1)


def test_jarnik_examples():
    assert jarnik_ratio(ConvexChain(np.array([(0, 0), (1, 0), (1, 1), (0, 1)]))) == 4.0
    assert jarnik_ratio(ConvexChain(np.array([(0, 0), (5, 0)]), closed=False)) == pytest.approx(2 / 5 ** (1 / 3))
    assert jarnik_ratio(ConvexChain(np.array([(3, 3)]))) == 1.0


def test_jarnik_ratio_bounded_over_square_peel():
    # recorded from this sweep: the maximum is 4, reached by the final unit squares
    ratios = [jarnik_ratio(r.vertices) for r in iter_layers(RowIntervalSet.rectangle(512, 512))]
    assert max(ratios) <= 4.0
    assert all(r > 0 for r in ratios)

"""Mobius function and primitive lattice vector counts."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .geometry import ConvexChain

SIEVE_LIMIT = 10**6
_OVERFLOW = 2**62


@lru_cache(maxsize=1)
def _spf_sieve(limit: int = SIEVE_LIMIT) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


@lru_cache(maxsize=8)
def mobius_table(limit: int) -> np.ndarray:
    """mu(0..limit) as an int8 array (mu(0) stored as 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    is_comp = np.zeros(limit + 1, dtype=bool)
    for p in range(2, limit + 1):
        if is_comp[p]:
            continue
        is_comp[p * p :: p] = True
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def mobius(k: int) -> int:
    if k < 1:
        raise ValueError("mobius is defined for k >= 1")
    spf = _spf_sieve() if k <= SIEVE_LIMIT else None
    result = 1
    p = 2
    while k > 1:
        if spf is not None:
            p = int(spf[k])
        else:
            while p * p <= k and k % p:
                p += 1
            if p * p > k:
                p = k
        k //= p
        if k % p == 0:
            return 0
        result = -result
        if spf is None and k <= SIEVE_LIMIT:
            spf = _spf_sieve()
    return result


def primitive_count_anchored(m: int, n: int) -> int:
    """Number of coprime pairs in {1..m} x {1..n}.

    Uses rho(m, n) = sum_d mu(d) floor(m/d) floor(n/d); terms vanish past
    min(m, n). Zero side lengths give 0.
    """
    if m < 0 or n < 0:
        raise ValueError("side lengths must be nonnegative")
    if m * n > _OVERFLOW:
        raise OverflowError("m * n exceeds 2**62")
    k = min(m, n)
    if k == 0:
        return 0
    mu = mobius_table(k)[1:].astype(np.int64)
    d = np.arange(1, k + 1, dtype=np.int64)
    return int(np.sum(mu * (m // d) * (n // d)))


class LatticeRect:
    """The block {a+1..a+m} x {b+1..b+n}."""

    def __init__(self, a: int, b: int, m: int, n: int):
        if m < 1 or n < 1 or a < 0 or b < 0:
            raise ValueError("need m, n >= 1 and a, b >= 0")
        self.a, self.b, self.m, self.n = a, b, m, n

    def __repr__(self) -> str:
        return f"LatticeRect(a={self.a}, b={self.b}, m={self.m}, n={self.n})"


def primitive_count_rect(rect: LatticeRect) -> int:
    rho = primitive_count_anchored
    a, b, m, n = rect.a, rect.b, rect.m, rect.n
    return rho(a + m, b + n) - rho(a + m, b) - rho(a, b + n) + rho(a, b)


def jarnik_ratio(chain: ConvexChain) -> float:
    """Vertex count over the cube root of the bounding-box area (sides floored at 1)."""
    v = np.asarray(chain.vertices)
    if len(v) == 0:
        return 0.0
    w = max(1, int(v[:, 0].max() - v[:, 0].min()))
    h = max(1, int(v[:, 1].max() - v[:, 1].min()))
    return len(v) / (w * h) ** (1.0 / 3.0)

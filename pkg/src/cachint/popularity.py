"""Zipf popularity, generalized harmonic numbers, zeta functions, and cache hit probability.

All request popularity is Zipf over file ranks 1..F.  The hit probability of a
cache holding the S most popular files is the Zipf CDF at rank S, expressible
through generalized harmonic numbers.  For large cache sizes the harmonic
numbers are evaluated through the Hurwitz zeta function and its Euler-Maclaurin
expansion, which also supplies the analytic continuation below exponent 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PoleError

# Bernoulli numbers B_2 .. B_10.  With the expansion argument shifted to
# >= _SHIFT_TARGET these five correction terms reach ~1e-10 absolute accuracy
# for exponents in [0.1, 10] without arbitrary-precision arithmetic.
_BERNOULLI = (
    (2, 1.0 / 6.0),
    (4, -1.0 / 30.0),
    (6, 1.0 / 42.0),
    (8, -1.0 / 30.0),
    (10, 5.0 / 66.0),
)
_SHIFT_TARGET = 20.0

# Above this count, direct summation switches to the zeta-difference identity.
_DIRECT_SUM_LIMIT = 10**7

_EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class ZipfCatalog:
    """Content library of `files` equal-size files with popularity skew `exponent`."""

    files: int
    exponent: float

    def __post_init__(self) -> None:
        if int(self.files) != self.files or self.files < 1:
            raise DomainError(f"catalog size must be an integer >= 1, got {self.files}")
        if not math.isfinite(self.exponent) or self.exponent < 0:
            raise DomainError(f"Zipf exponent must be finite and >= 0, got {self.exponent}")


@dataclass(frozen=True)
class CacheConfig:
    """Per-station cache holding the `files` most popular files."""

    files: int

    def __post_init__(self) -> None:
        if int(self.files) != self.files or self.files < 0:
            raise DomainError(f"cache size must be an integer >= 0, got {self.files}")


def harmonic_exact(count: int, exponent: float) -> float:
    """Partial sum sum_{n=1..count} n^-exponent by direct summation.

    Counts above 10^7 are rerouted through the zeta-difference identity
    (or a log expansion at exponent 1) to keep large sweeps fast.
    """
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    if exponent < 0:
        raise DomainError(f"exponent must be >= 0, got {exponent}")
    if count == 0:
        return 0.0
    if exponent == 0.0:
        return float(count)
    if count <= _DIRECT_SUM_LIMIT:
        # smallest terms first for a numerically clean pairwise sum
        terms = np.arange(count, 0, -1, dtype=np.float64) ** -float(exponent)
        return float(terms.sum())
    if exponent == 1.0:
        n = float(count)
        return (
            math.log(n)
            + _EULER_GAMMA
            + 1.0 / (2.0 * n)
            - 1.0 / (12.0 * n**2)
            + 1.0 / (120.0 * n**4)
        )
    return riemann_zeta(exponent) - hurwitz_zeta(exponent, count + 1.0)


@lru_cache(maxsize=512)
def _harmonic_cached(count: int, exponent: float) -> float:
    return harmonic_exact(count, exponent)


def zipf_pmf(catalog: ZipfCatalog, rank: int) -> float:
    """Probability that the rank-th most popular file is requested."""
    if rank < 1 or rank > catalog.files:
        raise DomainError(f"rank must lie in 1..{catalog.files}, got {rank}")
    return rank ** -float(catalog.exponent) / _harmonic_cached(catalog.files, catalog.exponent)


def hurwitz_zeta(s: float, a: float) -> float:
    """Hurwitz zeta: sum_{n>=0} (n+a)^-s, analytically continued for s < 1.

    Shifts the offset upward by direct summation until it reaches the
    expansion target, then applies the Euler-Maclaurin tail with Bernoulli
    corrections through B_10.
    """
    if s == 1.0:
        raise PoleError("hurwitz zeta has a pole at s = 1")
    if a <= 0:
        raise DomainError(f"offset must be > 0, got {a}")
    shift = int(math.ceil(_SHIFT_TARGET - a)) if a < _SHIFT_TARGET else 0
    head = math.fsum((a + n) ** -s for n in range(shift))
    x = a + shift
    tail = x ** (1.0 - s) / (s - 1.0) + 0.5 * x**-s
    poch = s  # (s)_1
    corr = 0.0
    for two_k, b in _BERNOULLI:
        corr += b / math.factorial(two_k) * poch * x ** (1.0 - s - two_k)
        poch *= (s + two_k - 1.0) * (s + two_k)  # (s)_{2k-1} -> (s)_{2k+1}
    return head + tail + corr


def riemann_zeta(exponent: float) -> float:
    """zeta(exponent); negative values are legal below 1 (analytic continuation)."""
    if exponent == 1.0:
        raise PoleError("riemann zeta has a pole at 1")
    if exponent <= 0:
        raise DomainError(f"exponent must be > 0, got {exponent}")
    return hurwitz_zeta(exponent, 1.0)


def harmonic_asymptotic(count: int, exponent: float) -> float:
    """Large-count approximation zeta(v) - (count+1)^(1-v)/(v-1)."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if exponent == 1.0:
        raise PoleError("asymptotic form undefined at exponent 1")
    if exponent <= 0:
        raise DomainError(f"exponent must be > 0, got {exponent}")
    return riemann_zeta(exponent) - (count + 1.0) ** (1.0 - exponent) / (exponent - 1.0)


def hit_probability_exact(catalog: ZipfCatalog, cache: CacheConfig) -> float:
    """Zipf CDF at the cache size: fraction of requests served from cache."""
    if cache.files > catalog.files:
        raise DomainError(
            f"cache size {cache.files} exceeds catalog size {catalog.files}"
        )
    if cache.files == 0:
        return 0.0
    return _harmonic_cached(cache.files, catalog.exponent) / _harmonic_cached(
        catalog.files, catalog.exponent
    )


class HitProbability(NamedTuple):
    """Clamped asymptotic hit probability plus its pre-clamp value."""

    value: float
    raw: float

    @property
    def clamped(self) -> bool:
        return self.value != self.raw


def hit_probability_asymptotic(catalog: ZipfCatalog, cache: CacheConfig) -> HitProbability:
    """Large-cache hit probability; clamped to [0, 1] with the raw value kept.

    The denominator harmonic number is computed exactly (direct sum for
    moderate catalogs, zeta difference for very large ones).
    """
    if cache.files < 1:
        raise DomainError(f"asymptotic form needs cache size >= 1, got {cache.files}")
    nu = catalog.exponent
    if nu == 1.0:
        raise PoleError("asymptotic hit probability undefined at exponent 1")
    if nu <= 0:
        raise DomainError(f"exponent must be > 0, got {nu}")
    h_catalog = _harmonic_cached(catalog.files, nu)
    raw = (
        riemann_zeta(nu) - (cache.files + 1.0) ** (1.0 - nu) / (nu - 1.0)
    ) / h_catalog
    return HitProbability(min(1.0, max(0.0, raw)), raw)

"""Prime enumeration, factorization, and divisor counting.

Everything here is sieve-backed and bounded by a configurable ceiling
(default 1e8).  A monolithic smallest-prime-factor table at the ceiling
would blow the memory budget, so the kernel keeps only a base sieve up to
sqrt(ceiling) and works in segments above that.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

DEFAULT_SIEVE_CEILING = 10**8

_SEGMENT = 1 << 22

_lock = threading.Lock()
_ceiling = DEFAULT_SIEVE_CEILING
_base_primes: np.ndarray | None = None
_base_limit = 0


class SieveRangeError(ValueError):
    """Requested bound exceeds the configured sieve ceiling."""


def sieve_ceiling() -> int:
    return _ceiling


def set_sieve_ceiling(value: int) -> None:
    """Set the hard upper bound for all sieve-backed operations."""
    global _ceiling
    if value < 2:
        raise ValueError("sieve ceiling must be at least 2")
    _ceiling = int(value)


def _check_bound(n: int) -> None:
    if n > _ceiling:
        raise SieveRangeError(
            f"bound {n} exceeds the configured sieve ceiling {_ceiling}"
        )


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit, cached and re-sieved only when limit grows."""
    global _base_primes, _base_limit
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    with _lock:
        if _base_primes is None or limit > _base_limit:
            size = max(limit, 1 << 14)
            mask = np.ones(size + 1, dtype=bool)
            mask[:2] = False
            for p in range(2, math.isqrt(size) + 1):
                if mask[p]:
                    mask[p * p :: p] = False
            _base_primes = np.flatnonzero(mask).astype(np.int64)
            _base_limit = size
        primes = _base_primes
    if limit >= _base_limit:
        return primes
    cut = np.searchsorted(primes, limit, side="right")
    return primes[:cut]


@dataclass(frozen=True)
class FactoredInteger:
    """Canonical factorization: n = prod(p**e), primes strictly increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def divisor_count(self) -> int:
        out = 1
        for _, e in self.factors:
            out *= e + 1
        return out

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def prime_divisors(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


@dataclass(frozen=True)
class PrimeRange:
    """The primes p with lo <= p <= hi, endpoints real."""

    lo: float
    hi: float
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.primes.size)

    def __contains__(self, p: int) -> bool:
        i = int(np.searchsorted(self.primes, p))
        return i < self.primes.size and int(self.primes[i]) == p


def primes_in_range(lo: float, hi: float) -> PrimeRange:
    """Exactly the primes in [lo, hi], ascending.

    Membership is decided by integer comparison against ceil(lo) and
    floor(hi); the endpoints themselves may be irrational.
    """
    if lo > hi:
        raise ValueError(f"empty ordering: lo={lo} > hi={hi}")
    if lo < 2:
        raise ValueError(f"lo must be >= 2, got {lo}")
    hi_i = math.floor(hi)
    _check_bound(hi_i)
    lo_i = math.ceil(lo)
    if lo_i > hi_i:
        return PrimeRange(lo, hi, np.empty(0, dtype=np.int64))
    root = math.isqrt(hi_i)
    bp = base_primes(root)
    chunks: list[np.ndarray] = []
    seg_lo = lo_i
    while seg_lo <= hi_i:
        seg_hi = min(seg_lo + _SEGMENT - 1, hi_i)
        mask = np.ones(seg_hi - seg_lo + 1, dtype=bool)
        if seg_lo <= 1:
            mask[: 2 - seg_lo] = False
        for p in bp:
            p = int(p)
            start = max(p * p, ((seg_lo + p - 1) // p) * p)
            if start > seg_hi:
                continue
            mask[start - seg_lo :: p] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + seg_lo)
        seg_lo = seg_hi + 1
    primes = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return PrimeRange(lo, hi, primes)


def factorize(n: int) -> FactoredInteger:
    """Trial-division factorization over the base-prime cache.

    Valid for 1 <= n <= ceiling; n = 1 yields an empty factor list.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    _check_bound(n)
    if n == 1:
        return FactoredInteger(1, ())
    m = n
    factors: list[tuple[int, int]] = []
    for p in base_primes(math.isqrt(n)):
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    if m > 1:
        factors.append((m, 1))
    return FactoredInteger(n, tuple(factors))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = factorize(n)
    return len(f.factors) == 1 and f.factors[0] == (n, 1)


def tau(n: int) -> int:
    """Number of divisors, prod(e_i + 1)."""
    return factorize(n).divisor_count()


def tau3(n: int) -> int:
    """Ordered factorizations into three parts, prod C(e_i + 2, 2)."""
    out = 1
    for _, e in factorize(n).factors:
        out *= (e + 1) * (e + 2) // 2
    return out


def divisors(n: int) -> list[int]:
    """All divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n).factors:
        out = [d * p**k for d in out for k in range(e + 1)]
    out.sort()
    return out

"""Hecke-multiplicative sequences and their quadratic mass.

A function f with f(1) = 1 is Hecke-multiplicative when

    f(m) f(n) = sum over d | gcd(m, n) of f(m n / d^2).

Taking coprime m, n shows f is multiplicative; taking (m, n) = (p, p^k)
gives the three-term recurrence f(p^(k+1)) = f(p) f(p^k) - f(p^(k-1)).
So f is determined by its values at primes, which is what a
`PrimeAssignment` supplies.

`build_sequence` materializes f(1..x) with a segmented sieve and keeps
error-tracked prefix sums of |f(n)|^2; `mass_ratio` evaluates the ratio
F(y; x) of the mass below x/y to the mass below x.  Above the
materialization limit the builder streams: it retains prefix sums at
requested checkpoints plus values in a bounded window.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .models import PrimeAssignment
from .numerics import NeumaierSum, compensated_prefix
from .primes import base_primes, divisors, factorize, sieve_ceiling
from .report import ABS_TOL, REL_TOL, BoundReport

MATERIALIZE_LIMIT = 10**7
DEFAULT_VALUE_WINDOW = 10**5
DEFAULT_SEGMENT = 1 << 22


def floor_quotient(x: int, y: float | int) -> int:
    """Exact floor(x / y) for integer x >= 0 and real y > 0.

    y is never rounded to an integer first: its exact binary value is used,
    so boundary cases like y = 4.0 against x = 10**4 come out exact.
    """
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    if isinstance(y, int):
        return x // y
    return math.floor(Fraction(x) / Fraction(y))


def prime_power_value(fp: complex | float, k: int):
    """f(p^k) from f(p) via f(p^(k+1)) = f(p) f(p^k) - f(p^(k-1)).

    Returns a float for real fp and a complex for complex fp.  Closed
    forms worth remembering: fp = 0 gives 0 at odd k and (-1)^(k/2) at
    even k; fp = 2 gives k + 1.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    one = fp * 0 + 1
    if k == 0:
        return one
    prev, cur = one, fp
    for _ in range(k - 1):
        prev, cur = cur, fp * cur - prev
    return cur


def _prime_power_table(fp: np.ndarray, max_e: int) -> np.ndarray:
    """Rows of f(p^e) for e = 0..max_e, one row per prime, vectorized."""
    tab = np.empty((fp.shape[0], max_e + 1), dtype=fp.dtype)
    tab[:, 0] = 1
    if max_e >= 1:
        tab[:, 1] = fp
    for e in range(1, max_e):
        tab[:, e + 1] = fp * tab[:, e] - tab[:, e - 1]
    return tab


def _segment_values(lo: int, hi: int, bp: list[int], tab: np.ndarray,
                    model: PrimeAssignment, dtype) -> np.ndarray:
    """f(n) for n in [lo, hi) by dividing out base primes, then the model.

    After all base primes p <= sqrt(x) are removed, the remainder of each n
    is either 1 or a single prime above sqrt(x), whose value comes straight
    from the model.
    """
    n = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    val = np.ones(n, dtype=dtype)
    top = hi - 1
    for i, p in enumerate(bp):
        off0 = (-lo) % p
        if off0 >= n:
            continue
        sl = slice(off0, n, p)
        q = p * p
        if q > top or (-lo) % q >= n:
            # exponent 1 throughout the segment: scalar fast path
            rem[sl] //= p
            val[sl] *= tab[i, 1]
            continue
        cnt = (n - off0 + p - 1) // p
        e = np.ones(cnt, dtype=np.int64)
        while q <= top:
            offq = (-lo) % q
            if offq >= n:
                break
            # multiples of q sit at an arithmetic progression inside the
            # multiples of p: start (offq-off0)/p, stride q/p
            e[(offq - off0) // p :: q // p] += 1
            if q > top // p:
                break
            q *= p
        sub = rem[sl]
        np.floor_divide(sub, np.int64(p) ** e, out=sub)
        val[sl] *= tab[i][e]
    left = rem > 1
    if left.any():
        val[left] *= model.values_at(rem[left])
    return val


def _abs_sq(values: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(values):
        return values.real**2 + values.imag**2
    return values * values


class HeckeSequence:
    """Materialized f(1..x) with prefix sums of |f(n)|^2.

    Below `MATERIALIZE_LIMIT` every value and every prefix sum is stored.
    Above it, only a bounded value window and checkpointed prefix sums
    survive; `S` raises on non-checkpointed queries rather than guessing.
    """

    def __init__(self, x_max: int, source: str, is_real: bool,
                 values: np.ndarray, value_window: int,
                 prefix: np.ndarray | None,
                 checkpoint_ts: np.ndarray | None,
                 checkpoint_sums: np.ndarray | None,
                 sum_compensation: float):
        self.x_max = x_max
        self.source = source
        self.is_real = is_real
        self._values = values
        self.value_window = value_window
        self._prefix = prefix
        self._ckpt_ts = checkpoint_ts
        self._ckpt_sums = checkpoint_sums
        #: accumulated rounding of the streaming total (diagnostic)
        self.sum_compensation = sum_compensation

    @property
    def materialized(self) -> bool:
        return self._prefix is not None

    def value(self, n: int) -> complex | float:
        """f(n) for 1 <= n <= value_window."""
        if not 1 <= n <= self.value_window:
            raise ValueError(
                f"f({n}) not stored (value window is 1..{self.value_window})"
            )
        v = self._values[n]
        return float(v) if self.is_real else complex(v)

    def value_or_zero(self, t) -> complex | float:
        """f(t) under the convention that f vanishes off the naturals."""
        if t != int(t) or t < 1:
            return 0.0
        return self.value(int(t))

    def values_upto(self, limit: int) -> np.ndarray:
        """Array v with v[n] = f(n) for 0 <= n <= limit (v[0] = 0)."""
        if limit > self.value_window:
            raise ValueError(
                f"values up to {limit} not stored (window {self.value_window})"
            )
        return self._values[: limit + 1]

    def sq_upto(self, limit: int) -> np.ndarray:
        """Array s with s[n] = |f(n)|^2 for 0 <= n <= limit."""
        return _abs_sq(self.values_upto(limit))

    def S(self, t: int) -> float:
        """Prefix sum S(t) = sum of |f(n)|^2 over n <= t."""
        if t < 1:
            return 0.0
        if t > self.x_max:
            raise ValueError(f"S({t}) beyond x_max={self.x_max}")
        if self._prefix is not None:
            return float(self._prefix[t])
        i = int(np.searchsorted(self._ckpt_ts, t))
        if i < self._ckpt_ts.size and int(self._ckpt_ts[i]) == t:
            return float(self._ckpt_sums[i])
        raise ValueError(
            f"S({t}) not checkpointed; rebuild with this checkpoint "
            f"(streaming mode stores only requested prefix sums)"
        )

    @property
    def total_sq(self) -> float:
        """S(x_max), the full quadratic mass."""
        return self.S(self.x_max)

    def __repr__(self) -> str:
        mode = "materialized" if self.materialized else "streaming"
        return (f"HeckeSequence(x_max={self.x_max}, model={self.source}, "
                f"{mode})")


def build_sequence(model: PrimeAssignment, x: int, *,
                   checkpoints=None, value_window: int | None = None,
                   workers: int = 1, segment_size: int = DEFAULT_SEGMENT,
                   materialize_limit: int = MATERIALIZE_LIMIT) -> HeckeSequence:
    """Materialize f(1..x) for a prime-value model.

    Parameters
    ----------
    model : PrimeAssignment
    x : int
        Upper limit; must not exceed the sieve ceiling.
    checkpoints : iterable of int, optional
        Prefix-sum positions to retain in streaming mode (x itself is
        always kept).  Ignored when the sequence is fully materialized.
    value_window : int, optional
        How many leading values f(1..W) to keep in streaming mode.
    workers : int
        Worker threads for segment sieving.  Segments are always merged
        in ascending order, so results are identical for any count.
    """
    if x < 1:
        raise ValueError(f"x must be positive, got {x}")
    if x > sieve_ceiling():
        raise ValueError(
            f"x={x} exceeds the sieve ceiling {sieve_ceiling()}"
        )
    materialize = x <= materialize_limit
    window = x if materialize else min(x, value_window or DEFAULT_VALUE_WINDOW)

    bp_arr = base_primes(math.isqrt(x))
    bp = [int(p) for p in bp_arr]
    dtype = np.float64 if model.is_real else np.complex128
    fp = model.values_at(bp_arr) if bp_arr.size else np.empty(0, dtype=dtype)
    fp = fp.astype(dtype, copy=False)
    max_e = max(1, int(math.log2(x)) + 1) if x > 1 else 1
    tab = _prime_power_table(fp, max_e)

    if materialize:
        ts = np.empty(0, dtype=np.int64)
    else:
        # t < 1 is S(t) = 0 by convention and never looked up
        wanted = {int(t) for t in (checkpoints or ()) if t >= 1}
        wanted.add(x)
        bad = [t for t in wanted if t > x]
        if bad:
            raise ValueError(f"checkpoints beyond x={x}: {bad}")
        ts = np.array(sorted(wanted), dtype=np.int64)

    segments = []
    lo = 1
    while lo <= x:
        hi = min(lo + segment_size, x + 1)
        segments.append((lo, hi))
        lo = hi

    def job(seg):
        lo, hi = seg
        val = _segment_values(lo, hi, bp, tab, model, dtype)
        if materialize:
            return val, None, None
        sq = _abs_sq(val)
        lo_i = int(np.searchsorted(ts, lo))
        hi_i = int(np.searchsorted(ts, hi - 1, side="right"))
        partials = []
        prev = 0
        running = 0.0
        for t in ts[lo_i:hi_i]:
            end = int(t) - lo + 1
            running += float(np.sum(sq[prev:end]))
            partials.append((int(t), running))
            prev = end
        total = running + float(np.sum(sq[prev:]))
        win = val[: window - lo + 1] if lo <= window else None
        return win, partials, total

    if workers > 1 and len(segments) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, segments))
    else:
        results = [job(seg) for seg in segments]

    if materialize:
        values = np.zeros(x + 1, dtype=dtype)
        for (lo, hi), (val, _, _) in zip(segments, results):
            values[lo:hi] = val
        sq = _abs_sq(values)
        prefix = compensated_prefix(sq)
        return HeckeSequence(x, model.source, model.is_real, values, x,
                             prefix, None, None, 0.0)

    values = np.zeros(window + 1, dtype=dtype)
    acc = NeumaierSum()
    ckpt_sums = np.empty(ts.size, dtype=np.float64)
    for (lo, hi), (win, partials, total) in zip(segments, results):
        if win is not None:
            values[lo : lo + win.shape[0]] = win
        for t, partial in partials:
            i = int(np.searchsorted(ts, t))
            ckpt_sums[i] = acc.total + partial
        acc.add(total)
    # S(x) is always the last checkpoint; make it the accumulator total
    ckpt_sums[-1] = acc.total
    return HeckeSequence(x, model.source, model.is_real, values, window,
                         None, ts, ckpt_sums, acc.compensation)


@dataclass(frozen=True)
class MassRatio:
    """F(y; x): the share of quadratic mass below x/y."""

    x: int
    y: float
    numerator: float
    denominator: float

    @property
    def value(self) -> float:
        return self.numerator / self.denominator


def mass_ratio(seq: HeckeSequence, y: float) -> MassRatio:
    """F(y) = S(floor(x/y)) / S(x), with F(y) = 0 when y > x."""
    if y < 1:
        raise ValueError(f"y must be >= 1, got {y}")
    denom = seq.total_sq
    if denom <= 0.0:
        raise ValueError("degenerate sequence: S(x) = 0 cannot normalize")
    if y > seq.x_max:
        return MassRatio(seq.x_max, float(y), 0.0, denom)
    t = floor_quotient(seq.x_max, y)
    return MassRatio(seq.x_max, float(y), seq.S(t), denom)


def mass_ratio_checkpoints(x: int, ys) -> list[int]:
    """Prefix-sum positions needed to evaluate F(y; x) on a y grid."""
    return sorted({floor_quotient(x, float(y)) for y in ys} | {x})


def value_by_factorization(model: PrimeAssignment, n: int):
    """f(n) as the product of f(p^e) over the factorization of n.

    Independent of the sieve path: useful as a cross-check oracle.
    """
    out: Any = 1.0 if model.is_real else complex(1.0)
    for p, e in factorize(n).factors:
        out = out * prime_power_value(model.value_at(p), e)
    return out


def verify_hecke_relation(seq: HeckeSequence, m: int, n: int) -> BoundReport:
    """Check f(m) f(n) = sum over d | gcd(m, n) of f(m n / d^2)."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    mn = m * n
    if mn > seq.x_max:
        raise ValueError(f"mn={mn} exceeds x_max={seq.x_max}")
    product = seq.value(m) * seq.value(n)
    g = math.gcd(m, n)
    hecke_sum = sum(seq.value(mn // (d * d)) for d in divisors(g))
    diff = abs(product - hecke_sum)
    scale = max(abs(product), abs(hecke_sum))
    return BoundReport(
        label="hecke-relation",
        lhs=diff,
        rhs=REL_TOL * scale + ABS_TOL,
        context={"m": m, "n": n, "product": product, "hecke_sum": hecke_sum},
    )

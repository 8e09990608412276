"""Verifiers for the mass-ratio inequalities.

Each check_* function evaluates both sides of one inequality on a concrete
sequence and wraps the outcome in a BoundReport.  The inequalities:

* prime bounds        |f(p)|  <= 2 / F(p)^(1/2)      (p <= x)
                      |f(p)|  <= 2 / F(p^2)^(1/4)    (p <= sqrt(x))
* divisibility bounds sums over d | n and d^2 | n against tau(d),
                      tau3(d) products and shifted mass ratios
* sparsity bounds     mass of integers with few prime (or prime-square)
                      divisors from a dyadic class of [sqrt(y)/2, sqrt(y)]
* the main bound      F(y) <= 1e8 (1 + log y) / sqrt(y)

`proof_trace` mirrors the contradiction argument behind the main bound as
a diagnostic: it selects the case hypothesis, the cutoff K, and reports
the mass split that the argument would contradict.  Nothing is asserted
there -- for a genuine Hecke-multiplicative f the exceptional case never
occurs.

The numeric constants are only claimed for y >= 1e16; checks still run for
any y >= 4 but carry an explicit small-y warning below that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import HeckeSequence, floor_quotient, mass_ratio
from .primes import PrimeRange, factorize, is_prime, primes_in_range, tau, tau3
from .report import BoundReport

SMALL_Y_LIMIT = 1e16
SMALL_Y_WARNING = "paper constants assume y >= 1e16"
THEOREM3_CONSTANT = 1e8


def chebyshev_floor(y: float) -> float:
    """Lower bound sqrt(y)/(2 log y) for the prime count of [sqrt(y)/2, sqrt(y)].

    Only valid (and only asserted) for y >= 1e16; below that the count is
    reported without assertion.
    """
    return math.sqrt(y) / (2.0 * math.log(y))


@dataclass(frozen=True)
class PrimePartition:
    """Dyadic split of the primes in [sqrt(y)/2, sqrt(y)] by |f(p)|.

    Class 0 holds |f(p)| <= 1/2 (where f(p^2) = f(p)^2 - 1 is bounded away
    from zero); class j >= 1 holds 2^(j-2) < |f(p)| <= 2^(j-1), upper
    endpoint inclusive.
    """

    x: int
    y: float
    F_y: float
    J: int
    prime_range: PrimeRange
    classes: dict[int, int]
    sets: tuple[np.ndarray, ...]
    small_y_warning: bool
    chebyshev_lower: float
    chebyshev_asserted: bool

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(int(s.size) for s in self.sets)


def partition_index(abs_fp: float, J: int) -> int:
    """Class index for |f(p)|: 0 if <= 1/2, else j with 2^(j-2) < . <= 2^(j-1)."""
    if abs_fp <= 0.5:
        return 0
    j = 1
    while abs_fp > 2.0 ** (j - 1):
        j += 1
        if j > J:
            raise ValueError(
                f"|f(p)|={abs_fp} exceeds 2^(J-1) with J={J}; "
                "input is not consistent with a Hecke-multiplicative f"
            )
    return j


def partition_primes(seq: HeckeSequence, y: float) -> PrimePartition:
    """Build the prime partition at y.  Requires y >= 4 and F(y) > 0."""
    if y < 4:
        raise ValueError(f"y must be >= 4 so the prime range is nonempty-able, got {y}")
    F_y = mass_ratio(seq, y).value
    if F_y <= 0.0:
        raise ValueError(f"F({y}) = 0: the class count J is undefined")
    J = int(math.floor(math.log(1.0 / F_y) / (4.0 * math.log(2.0)))) + 3
    root = math.sqrt(y)
    prange = primes_in_range(max(2.0, root / 2.0), root)
    classes: dict[int, int] = {}
    buckets: list[list[int]] = [[] for _ in range(J + 1)]
    for p in prange.primes:
        p = int(p)
        j = partition_index(abs(seq.value(p)), J)
        classes[p] = j
        buckets[j].append(p)
    sets = tuple(np.array(b, dtype=np.int64) for b in buckets)
    count = len(prange)
    cheb = chebyshev_floor(y)
    asserted = y >= SMALL_Y_LIMIT
    if asserted and count < cheb:
        raise ValueError(
            f"prime count {count} below the asserted floor {cheb} at y={y}"
        )
    return PrimePartition(
        x=seq.x_max, y=float(y), F_y=F_y, J=J, prime_range=prange,
        classes=classes, sets=sets, small_y_warning=y < SMALL_Y_LIMIT,
        chebyshev_lower=cheb, chebyshev_asserted=asserted,
    )


@dataclass(frozen=True)
class SmoothnessCount:
    """Per-class divisor統computed from the exact factorization of n.

    prime_counts[j] is the number of distinct primes of class j dividing n;
    square_count_p0 counts the class-0 primes whose square divides n.
    """

    n: int
    prime_counts: tuple[int, ...]
    square_count_p0: int

    def in_sparse_set(self, j: int, k: int) -> bool:
        """Membership in N_j(k): at most k distinct class-j primes divide n
        (for j >= 1), or at most k distinct class-0 prime squares (j = 0)."""
        if j == 0:
            return self.square_count_p0 <= k
        return self.prime_counts[j] <= k


def smoothness_count(n: int, part: PrimePartition) -> SmoothnessCount:
    counts = [0] * (part.J + 1)
    squares0 = 0
    for p, e in factorize(n).factors:
        j = part.classes.get(p)
        if j is None:
            continue
        counts[j] += 1
        if j == 0 and e >= 2:
            squares0 += 1
    return SmoothnessCount(n, tuple(counts), squares0)


def _divisor_counts(limit: int, primes: np.ndarray, square: bool) -> np.ndarray:
    """counts[n] = #distinct listed primes p with p | n (or p^2 | n)."""
    counts = np.zeros(limit + 1, dtype=np.int32)
    for p in primes:
        step = int(p) * int(p) if square else int(p)
        if step <= limit:
            counts[step::step] += 1
    return counts


def check_lemma31_first(seq: HeckeSequence, p: int) -> BoundReport:
    """|f(p)| <= 2 / F(p)^(1/2) for a prime p <= x."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if p > seq.x_max:
        raise ValueError(f"p={p} exceeds x={seq.x_max}")
    F_p = mass_ratio(seq, p).value
    ctx = {"p": p, "x": seq.x_max, "F_p": F_p}
    if F_p <= 0.0:
        return BoundReport("lemma31-first", 0.0, 0.0, ctx, vacuous=True,
                           warnings=("F(p) = 0: bound is vacuous",))
    return BoundReport(
        "lemma31-first", abs(seq.value(p)), 2.0 / math.sqrt(F_p), ctx
    )


def check_lemma31_second(seq: HeckeSequence, p: int) -> BoundReport:
    """|f(p)| <= 2 / F(p^2)^(1/4) for p <= sqrt(x).

    The proof's intermediate inequality |f(p^2)| <= 3 / F(p^2)^(1/2) is
    evaluated as well and carried in the context.
    """
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if p * p > seq.x_max:
        raise ValueError(f"p={p} exceeds sqrt(x) for x={seq.x_max}")
    F_p2 = mass_ratio(seq, float(p * p)).value
    ctx = {"p": p, "x": seq.x_max, "F_p2": F_p2}
    if F_p2 <= 0.0:
        return BoundReport("lemma31-second", 0.0, 0.0, ctx, vacuous=True,
                           warnings=("F(p^2) = 0: bound is vacuous",))
    inter_lhs = abs(seq.value(p * p))
    inter_rhs = 3.0 / math.sqrt(F_p2)
    ctx["intermediate_lhs"] = inter_lhs
    ctx["intermediate_rhs"] = inter_rhs
    ctx["intermediate_pass"] = inter_lhs <= inter_rhs * (1 + 1e-9) + 1e-12
    return BoundReport(
        "lemma31-second", abs(seq.value(p)), 2.0 / F_p2**0.25, ctx
    )


def check_prop32_squarefree(seq: HeckeSequence, y: float, d: int) -> BoundReport:
    """Mass of multiples of square-free d below x/y against
    tau(d) * prod(1 + |f(p)|^2) * F(yd) * S(x)."""
    if y < 1:
        raise ValueError(f"y must be >= 1, got {y}")
    fd = factorize(d)
    if not fd.is_squarefree():
        raise ValueError(f"d={d} is not square-free")
    m = floor_quotient(seq.x_max, y)
    sq = seq.sq_upto(m)
    lhs = float(np.sum(sq[d::d])) if d <= m else 0.0
    prod = 1.0
    for p in fd.prime_divisors():
        prod *= 1.0 + abs(seq.value(p)) ** 2
    shifted = seq.S(floor_quotient(seq.x_max, Fraction(y) * d))
    rhs = tau(d) * prod * shifted
    return BoundReport(
        "prop32-squarefree", lhs, rhs,
        {"x": seq.x_max, "y": float(y), "d": d, "tau_d": tau(d),
         "shifted_mass": shifted},
    )


def check_prop32_square(seq: HeckeSequence, y: float, d: int) -> BoundReport:
    """Mass of multiples of d^2 below x/y against
    tau3(d) * prod(2 + |f(p^2)|^2) * F(y d^2) * S(x)."""
    if y < 1:
        raise ValueError(f"y must be >= 1, got {y}")
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    fd = factorize(d)
    m = floor_quotient(seq.x_max, y)
    d2 = d * d
    sq = seq.sq_upto(m)
    lhs = float(np.sum(sq[d2::d2])) if d2 <= m else 0.0
    prod = 1.0
    for p in fd.prime_divisors():
        prod *= 2.0 + abs(seq.value(p * p)) ** 2
    shifted = seq.S(floor_quotient(seq.x_max, Fraction(y) * d2))
    rhs = tau3(d) * prod * shifted
    return BoundReport(
        "prop32-square", lhs, rhs,
        {"x": seq.x_max, "y": float(y), "d": d, "tau3_d": tau3(d),
         "shifted_mass": shifted},
    )


def _sparse_mass(seq: HeckeSequence, m: int, primes: np.ndarray,
                 k: int, square: bool) -> float:
    sq = seq.sq_upto(m)
    counts = _divisor_counts(m, primes, square=square)
    return float(np.sum(sq[counts <= k]))


def check_prop33_zero(seq: HeckeSequence, y: float, k: int) -> BoundReport:
    """Mass below x/y of integers with at most k distinct class-0 prime
    squares, against (4k / |P_0|) * S(x).  Stated for 2 <= k <= |P_0|/4."""
    part = partition_primes(seq, y)
    p0 = part.sets[0]
    warnings = (SMALL_Y_WARNING,) if part.small_y_warning else ()
    ctx = {"x": seq.x_max, "y": float(y), "k": k, "P0_size": int(p0.size)}
    if p0.size == 0:
        return BoundReport("prop33-zero", 0.0, 0.0, ctx, vacuous=True,
                           warnings=warnings + ("P_0 is empty",))
    if k < 2 or 4 * k > p0.size:
        raise ValueError(
            f"k={k} outside the stated range 2 <= k <= |P_0|/4 = {p0.size}/4"
        )
    m = floor_quotient(seq.x_max, y)
    lhs = _sparse_mass(seq, m, p0, k, square=True)
    rhs = (4.0 * k / p0.size) * seq.total_sq
    return BoundReport("prop33-zero", lhs, rhs, ctx, warnings=warnings)


def check_prop33_j(seq: HeckeSequence, y: float, j: int, k: int) -> BoundReport:
    """Mass below x/y of integers with at most k distinct class-j primes,
    against (2^12 k^2 / (2^(4j) |P_j|^2)) * S(x).
    Stated for 1 <= j <= J and 1 <= k <= |P_j|/4 - 1."""
    part = partition_primes(seq, y)
    if not 1 <= j <= part.J:
        raise ValueError(f"j={j} outside 1..J={part.J}")
    pj = part.sets[j]
    warnings = (SMALL_Y_WARNING,) if part.small_y_warning else ()
    ctx = {"x": seq.x_max, "y": float(y), "j": j, "k": k,
           "Pj_size": int(pj.size)}
    if pj.size == 0:
        return BoundReport("prop33-j", 0.0, 0.0, ctx, vacuous=True,
                           warnings=warnings + (f"P_{j} is empty",))
    if k < 1 or 4 * (k + 1) > pj.size:
        raise ValueError(
            f"k={k} outside the stated range 1 <= k <= |P_j|/4 - 1 "
            f"with |P_j| = {pj.size}"
        )
    m = floor_quotient(seq.x_max, y)
    lhs = _sparse_mass(seq, m, pj, k, square=False)
    rhs = (2.0**12 * k * k) / (2.0 ** (4 * j) * pj.size**2) * seq.total_sq
    return BoundReport("prop33-j", lhs, rhs, ctx, warnings=warnings)


def check_theorem3(seq: HeckeSequence, y: float) -> BoundReport:
    """S(x/y) <= 1e8 ((1 + log y) / sqrt(y)) S(x) for 1 <= y <= x.

    The context carries the observed ratio F(y) sqrt(y) / (1 + log y); the
    sharp version of the bound says this stays O(1).
    """
    if not 1 <= y <= seq.x_max:
        raise ValueError(f"y={y} outside [1, x={seq.x_max}]")
    mr = mass_ratio(seq, y)
    logy = math.log(y)
    rhs = THEOREM3_CONSTANT * (1.0 + logy) / math.sqrt(y) * mr.denominator
    observed = mr.value * math.sqrt(y) / (1.0 + logy)
    return BoundReport(
        "theorem3", mr.numerator, rhs,
        {"x": seq.x_max, "y": float(y), "F_y": mr.value,
         "observed_ratio": observed},
    )


@dataclass(frozen=True)
class ProofTrace:
    """Diagnostic mirror of the contradiction argument for one (f, x, y).

    Records which case hypothesis holds (1: the small-value class is large;
    2: some dyadic class j is large), the cutoff K for that case, and the
    mass split between integers inside and outside the sparse set N(K).
    The argument would force mass_outside >= half_mass for an exceptional
    y; no valid input ever triggers that branch, so nothing is asserted.
    """

    x: int
    y: float
    F_y: float
    J: int
    class_sizes: tuple[int, ...]
    case: int | None
    j: int | None
    K: int | None
    hypothesis_size: int | None
    hypothesis_threshold: float
    mass_in_N: float | None
    mass_outside_N: float | None
    half_mass: float
    small_y_warning: bool
    warnings: tuple[str, ...]


def proof_trace(seq: HeckeSequence, y: float) -> ProofTrace:
    part = partition_primes(seq, y)
    sizes = part.sizes
    sqrt_y = math.sqrt(y)
    log_y = math.log(y)
    half_mass = 0.5 * part.F_y * seq.total_sq
    warnings: tuple[str, ...] = (
        (SMALL_Y_WARNING,) if part.small_y_warning else ()
    )

    case: int | None = None
    j_sel: int | None = None
    threshold = sqrt_y / (4.0 * log_y)
    if sizes[0] >= threshold:
        case = 1
    else:
        threshold = sqrt_y / (4.0 * part.J * log_y)
        for j in range(1, part.J + 1):
            if sizes[j] >= threshold:
                case = 2
                j_sel = j
                break
    if case is None:
        return ProofTrace(
            x=seq.x_max, y=float(y), F_y=part.F_y, J=part.J,
            class_sizes=sizes, case=None, j=None, K=None,
            hypothesis_size=None, hypothesis_threshold=threshold,
            mass_in_N=None, mass_outside_N=None, half_mass=half_mass,
            small_y_warning=part.small_y_warning,
            warnings=warnings + ("no case hypothesis holds at this y",),
        )

    if case == 1:
        size = sizes[0]
        K = int(math.floor(size * part.F_y / 8.0))
        primes = part.sets[0]
        square = True
    else:
        size = sizes[j_sel]
        K = int(math.floor(2.0 ** (2 * j_sel - 9) * size * math.sqrt(part.F_y)))
        primes = part.sets[j_sel]
        square = False

    m = floor_quotient(seq.x_max, y)
    mass_in = _sparse_mass(seq, m, primes, K, square=square)
    mass_out = float(seq.S(m)) - mass_in
    return ProofTrace(
        x=seq.x_max, y=float(y), F_y=part.F_y, J=part.J, class_sizes=sizes,
        case=case, j=j_sel, K=K, hypothesis_size=size,
        hypothesis_threshold=threshold, mass_in_N=mass_in,
        mass_outside_N=mass_out, half_mass=half_mass,
        small_y_warning=part.small_y_warning, warnings=warnings,
    )

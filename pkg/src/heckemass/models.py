"""Prime-value models: the data that determines a Hecke-multiplicative f.

A model answers one question -- what is f(p)? -- for every prime up to the
sieve ceiling.  Everything else (prime powers, composite n) follows from
the Hecke recurrence in `core`.

Built-ins:

* extremal:  f(p) = 0, which forces |f| = 1 on perfect squares and 0
  elsewhere; the sharpness example for the sqrt(y) mass-ratio decay.
* tau-like:  f(p) = 2, which forces f(n) = tau(n); the boundary case with
  |f(p)| maximal among [-2, 2]-valued models.
* sato-tate: f(p) = 2 cos(theta_p) with theta_p drawn per prime from the
  density (2/pi) sin^2(theta) on [0, pi].
* file:      explicit values from disk with a declared default rule.

Sato-Tate draws use a counter-based generator keyed on (seed, p): the
value at p never depends on enumeration order, so segment-parallel sieving
sees identical values no matter which worker asks first.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .primes import sieve_ceiling

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MULT1 = _U64(0xBF58476D1CE4E5B9)
_MULT2 = _U64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64."""
    z = (z + _GOLDEN).astype(_U64)
    z = (z ^ (z >> _U64(30))) * _MULT1
    z = (z ^ (z >> _U64(27))) * _MULT2
    return z ^ (z >> _U64(31))


def _counter_uniform(seed: int, counters: np.ndarray) -> np.ndarray:
    """Deterministic uniforms in [0, 1) keyed on (seed, counter).

    Two mixing rounds; the output keeps 32 bits of resolution so the
    sampled values are exactly reproducible across platforms.
    """
    with np.errstate(over="ignore"):
        key = _mix64(np.asarray(seed % (1 << 64), dtype=_U64))
        h = _mix64(_mix64(counters.astype(_U64)) ^ key)
    return (h >> _U64(32)).astype(np.float64) * 2.0**-32


# Monotone CDF table for the density (2/pi) sin^2(theta) on [0, pi]:
# C(theta) = (2 theta - sin 2 theta) / (2 pi), inverted by linear
# interpolation on 2**16 panels.
_TABLE_N = 1 << 16
_THETA_TABLE = np.linspace(0.0, math.pi, _TABLE_N + 1)
_CDF_TABLE = (2.0 * _THETA_TABLE - np.sin(2.0 * _THETA_TABLE)) / (2.0 * math.pi)
_CDF_TABLE[0] = 0.0
_CDF_TABLE[-1] = 1.0


def _sample_angles(u: np.ndarray) -> np.ndarray:
    return np.interp(u, _CDF_TABLE, _THETA_TABLE)


class PrimeAssignment:
    """Deterministic map p -> f(p) for primes up to the sieve ceiling."""

    #: model identifier, e.g. "extremal" or "sato-tate(7)"
    source: str = "abstract"
    #: True when every value is real (lets the sieve store float64)
    is_real: bool = True

    def values_at(self, primes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value_at(self, p: int) -> complex | float:
        arr = self.values_at(np.asarray([p], dtype=np.int64))
        v = arr[0]
        return float(v.real) if self.is_real else complex(v)


class ExtremalModel(PrimeAssignment):
    """f(p) = 0 for all p; mass concentrates on perfect squares."""

    source = "extremal"

    def values_at(self, primes: np.ndarray) -> np.ndarray:
        return np.zeros(primes.shape[0], dtype=np.float64)


class TauLikeModel(PrimeAssignment):
    """f(p) = 2 for all p; the induced f(n) is the divisor count tau(n)."""

    source = "tau-like"

    def values_at(self, primes: np.ndarray) -> np.ndarray:
        return np.full(primes.shape[0], 2.0)


class SatoTateModel(PrimeAssignment):
    """f(p) = 2 cos(theta_p), theta_p ~ (2/pi) sin^2 on [0, pi], per prime."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.source = f"sato-tate({self.seed})"

    def values_at(self, primes: np.ndarray) -> np.ndarray:
        u = _counter_uniform(self.seed, primes)
        return 2.0 * np.cos(_sample_angles(u))


class FileModel(PrimeAssignment):
    """Explicit per-prime values from a text file.

    Format: first a header line ``default zero`` or
    ``default sato-tate:<seed>``, then one line per prime
    ``p value_re [value_im]``, whitespace-separated.  Blank lines and
    ``#`` comments are ignored.  Unlisted primes follow the default rule.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.source = f"file({self.path})"
        listed: dict[int, complex] = {}
        default: PrimeAssignment | None = None
        with open(self.path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if parts[0] == "default":
                    if len(parts) != 2:
                        raise ValueError(
                            f"{self.path}:{lineno}: malformed default rule"
                        )
                    rule = parts[1]
                    if rule == "zero":
                        default = ExtremalModel()
                    elif rule.startswith("sato-tate:"):
                        default = SatoTateModel(int(rule.split(":", 1)[1]))
                    else:
                        raise ValueError(
                            f"{self.path}:{lineno}: unknown default rule {rule!r}"
                        )
                    continue
                if len(parts) not in (2, 3):
                    raise ValueError(
                        f"{self.path}:{lineno}: expected 'p re [im]', got {line!r}"
                    )
                p = int(parts[0])
                if p > sieve_ceiling():
                    raise ValueError(
                        f"{self.path}:{lineno}: prime {p} above sieve ceiling"
                    )
                re = float(parts[1])
                im = float(parts[2]) if len(parts) == 3 else 0.0
                listed[p] = complex(re, im)
        if default is None:
            raise ValueError(f"{self.path}: missing 'default' header line")
        self._default = default
        self._listed_primes = np.array(sorted(listed), dtype=np.int64)
        values = np.array([listed[int(p)] for p in self._listed_primes])
        self.is_real = bool(np.all(values.imag == 0.0))
        self._listed_values = values.real.copy() if self.is_real else values

    def values_at(self, primes: np.ndarray) -> np.ndarray:
        out = self._default.values_at(primes)
        if not self.is_real:
            out = out.astype(np.complex128)
        if self._listed_primes.size:
            pos = np.searchsorted(self._listed_primes, primes)
            pos = np.minimum(pos, self._listed_primes.size - 1)
            hit = self._listed_primes[pos] == primes
            out[hit] = self._listed_values[pos[hit]]
        return out


def extremal_model() -> ExtremalModel:
    return ExtremalModel()


def tau_like_model() -> TauLikeModel:
    return TauLikeModel()


def sato_tate_model(seed: int) -> SatoTateModel:
    return SatoTateModel(seed)


def file_model(path: str | Path) -> FileModel:
    return FileModel(path)


def model_from_spec(kind: str, seed: int | None = None,
                    path: str | Path | None = None) -> PrimeAssignment:
    """Build a model from its CLI-style spec (kind, optional seed/path)."""
    if kind == "extremal":
        return ExtremalModel()
    if kind == "tau-like":
        return TauLikeModel()
    if kind == "sato-tate":
        if seed is None:
            raise ValueError("sato-tate model requires a seed")
        return SatoTateModel(seed)
    if kind == "file":
        if path is None:
            raise ValueError("file model requires a path")
        return FileModel(path)
    raise ValueError(f"unknown model kind {kind!r}")

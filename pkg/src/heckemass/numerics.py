"""Summation helpers for long nonnegative series.

Prefix sums over 1e8 terms are the backbone of every mass ratio here, so
plain left-to-right accumulation (error O(n*eps)) is not good enough for
the 1e-9 tolerance checks.  Two tools:

* NeumaierSum -- running error-tracked scalar accumulator.  The primary
  sum only ever receives nonnegative block totals, so checkpointed reads
  are monotone; the compensation term is kept separate as a diagnostic.
* compensated_prefix -- full prefix-sum array built from blockwise
  pairwise sums chained in order, keeping the error at O(sqrt(block))
  ulps instead of O(n).
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 16


class NeumaierSum:
    """Kahan-Babuska (Neumaier) compensated accumulator.

    ``total`` is the plain running sum (monotone under nonnegative adds);
    ``compensation`` tracks the accumulated rounding error.
    """

    __slots__ = ("total", "compensation")

    def __init__(self) -> None:
        self.total = 0.0
        self.compensation = 0.0

    def add(self, value: float) -> None:
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.compensation += (self.total - t) + value
        else:
            self.compensation += (value - t) + self.total
        self.total = t

    @property
    def corrected(self) -> float:
        return self.total + self.compensation


def compensated_prefix(sq: np.ndarray) -> np.ndarray:
    """Prefix sums of a nonnegative float array with bounded rounding error.

    Returns ``out`` with ``out[i] = sq[0] + ... + sq[i]``.  Cumulative sums
    run inside blocks of 2**16; block offsets are chained from each block's
    own final cumsum value, which keeps the result nondecreasing for
    nonnegative input (the offset of block k+1 equals the last prefix value
    of block k exactly).
    """
    n = sq.shape[0]
    out = np.empty(n, dtype=np.float64)
    offset = 0.0
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        np.cumsum(sq[start:stop], out=out[start:stop])
        if offset != 0.0:
            out[start:stop] += offset
        offset = out[stop - 1]
    return out

"""Uniform result carrier for inequality checks.

Every verifier produces a BoundReport: the two sides of the inequality,
the margin, and a pass flag under the shared tolerance rule

    pass  <=>  lhs <= rhs * (1 + REL_TOL) + ABS_TOL.

Vacuous checks (empty prime class, zero mass ratio) pass with an explicit
flag so that batch runs can tell a proved inequality from a degenerate one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

REL_TOL = 1e-9
ABS_TOL = 1e-12


def within_tolerance(lhs: float, rhs: float) -> bool:
    """Shared pass rule for lhs <= rhs up to floating-point slack."""
    return lhs <= rhs * (1.0 + REL_TOL) + ABS_TOL


@dataclass(frozen=True)
class BoundReport:
    """One verified inequality instance: lhs <= rhs."""

    label: str
    lhs: float
    rhs: float
    context: dict[str, Any] = field(default_factory=dict)
    vacuous: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if self.vacuous:
            return True
        return within_tolerance(self.lhs, self.rhs)

    def __str__(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        if self.vacuous:
            tag += " (vacuous)"
        return (
            f"[{tag}] {self.label}: lhs={self.lhs!r} rhs={self.rhs!r} "
            f"margin={self.margin!r}"
        )

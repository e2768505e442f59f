"""Inequality evaluation records."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

DEFAULT_EQ_TOL = 1e-7


@dataclass(frozen=True)
class InequalityReport:
    """One evaluated inequality.

    ``gap`` is oriented so that ``gap >= 0`` means the inequality holds.
    ``equality`` is ``|gap| <= eq_tol * max(|lhs|, |rhs|)``.
    """

    name: str
    lhs: float
    rhs: float
    gap: float
    equality: bool
    eq_tol: float
    meta: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def upper(cls, name: str, lhs: float, rhs: float, eq_tol: float = DEFAULT_EQ_TOL, **meta):
        """Report for ``lhs <= rhs``."""
        return cls._make(name, float(lhs), float(rhs), float(rhs) - float(lhs), eq_tol, meta)

    @classmethod
    def lower(cls, name: str, lhs: float, rhs: float, eq_tol: float = DEFAULT_EQ_TOL, **meta):
        """Report for ``lhs >= rhs``."""
        return cls._make(name, float(lhs), float(rhs), float(lhs) - float(rhs), eq_tol, meta)

    @classmethod
    def _make(cls, name, lhs, rhs, gap, eq_tol, meta):
        eq = abs(gap) <= eq_tol * max(abs(lhs), abs(rhs))
        return cls(name, lhs, rhs, gap, bool(eq), float(eq_tol), dict(meta))

    @property
    def relative_gap(self) -> float:
        return self.gap / max(abs(self.lhs), abs(self.rhs))

    def holds(self, tol: float = 1e-9) -> bool:
        return self.gap >= -tol

    def with_meta(self, **extra) -> "InequalityReport":
        return InequalityReport(
            self.name, self.lhs, self.rhs, self.gap, self.equality, self.eq_tol, {**self.meta, **extra}
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "equality": self.equality,
            "eq_tol": self.eq_tol,
            "meta": dict(self.meta),
        }

"""
Model classes for geodesic balls in the unit sphere.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..exceptions import DomainError
from .numerics import FloatArray

DOMAIN_NOTE = "two-point and gap-chain checks cover geodesic balls only"


@dataclass(frozen=True)
class CapProblem:
    """Geodesic ball of radius R in S^n; its diameter is D = 2R."""

    n: int
    R: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"dimension n must be >= 2, got {self.n}")
        if not 0.0 < self.R <= 0.5 * math.pi:
            raise DomainError(f"radius out of range: R={self.R} must lie in (0, pi/2]")

    @classmethod
    def from_diameter(cls, n: int, D: float) -> "CapProblem":
        return cls(n=n, R=0.5 * D)

    @property
    def D(self) -> float:
        return 2.0 * self.R

    @property
    def hemisphere(self) -> bool:
        return self.R == 0.5 * math.pi


@dataclass(eq=False)
class RadialEigen:
    """Radial profile of the l-th angular mode on [0, R]."""

    l: int
    value: float
    r: FloatArray
    samples: FloatArray
    dphi: FloatArray
    tolerance: float
    method: str
    evaluator: Callable[[Any], FloatArray] | None = field(default=None, repr=False)

    def log_derivative(self, r: Any) -> FloatArray:
        """(log phi)'(r); exactly 0 at the center for l = 0."""
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        if self.evaluator is not None:
            state = self.evaluator(rr)
            result: FloatArray = state[1] / state[0]
        else:
            result = np.interp(rr, self.r, self.dphi) / np.interp(rr, self.r, self.samples)
        if self.l == 0:
            result = np.where(rr == 0.0, 0.0, result)
        return result

    def to_dict(self) -> dict[str, Any]:
        """Convert RadialEigen summary to dictionary."""
        return {
            "l": self.l,
            "lambda": self.value,
            "tolerance": self.tolerance,
            "method": self.method,
        }


@dataclass(eq=False)
class TwoPointSample:
    """One pair x, y in the ball with both sides of the two-point inequality."""

    x: FloatArray
    y: FloatArray
    d: float
    lhs: float
    rhs: float
    geodesic_error: float = 0.0

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def row(self) -> tuple[float, ...]:
        """(x.y, d, lhs, rhs, margin) for CSV emission."""
        return (float(np.dot(self.x, self.y)), self.d, self.lhs, self.rhs, self.margin)


@dataclass
class GapChainReport:
    """Margins of lambda_1 - lambda_0 >= mu_1 - mu_0 >= 3 pi^2/D^2 and mu_0 <= lambda_0."""

    n: int
    D: float
    lambda0: float
    lambda1: float
    mu0: float
    mu1: float
    margins: dict[str, float]
    tolerance: float
    note: str = DOMAIN_NOTE

    @property
    def passed(self) -> bool:
        return all(m >= -self.tolerance for m in self.margins.values())

    def to_dict(self) -> dict[str, Any]:
        """Convert GapChainReport instance to dictionary."""
        return {
            "n": self.n,
            "D": self.D,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "mu0": self.mu0,
            "mu1": self.mu1,
            "margins": dict(self.margins),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "note": self.note,
        }

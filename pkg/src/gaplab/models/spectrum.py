"""
Model classes for the one-dimensional model spectrum.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from ..exceptions import DomainError
from .numerics import FloatArray, Grid1D

# Diameters this close to pi make tan(D/2) numerically meaningless.
DIAMETER_MARGIN = 1e-9


class Parity(Enum):
    """Symmetry of an eigenfunction on [-D/2, D/2]."""

    EVEN = "even"
    ODD = "odd"


class Normalization(Enum):
    """Eigenfunction scaling convention."""

    DERIVATIVE_AT_RIGHT = "derivative_at_right"  # phi'(D/2) = -1
    SUP_NORM = "sup_norm"


def check_diameter(D: float) -> None:
    """Raise DomainError unless 0 < D < pi."""
    if not (0.0 < D < math.pi - DIAMETER_MARGIN):
        raise DomainError(f"diameter out of range: D={D!r} must lie in (0, pi)")


@dataclass(frozen=True, eq=False)
class ModelProblem:
    """One instance of phi'' - (n-1) tan(z) phi' on [-D/2, D/2]."""

    n: int
    D: float
    grid: Grid1D

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"dimension n must be >= 1, got {self.n}")
        check_diameter(self.D)
        if self.grid.a != 0.0 or not math.isclose(self.grid.b, 0.5 * self.D):
            raise DomainError("ModelProblem grid must span [0, D/2]")

    @classmethod
    def create(cls, n: int, D: float, nodes: int = 2001) -> "ModelProblem":
        """Build a problem with the default half-interval grid."""
        check_diameter(D)
        return cls(n=n, D=D, grid=Grid1D.for_diameter(D, nodes))

    @property
    def half(self) -> float:
        return 0.5 * self.D

    @property
    def m(self) -> float:
        return 0.5 * (self.n - 1)

    def with_grid(self, grid: Grid1D) -> "ModelProblem":
        return ModelProblem(n=self.n, D=self.D, grid=grid)


@dataclass(eq=False)
class EigenPair:
    """Eigenvalue with its eigenfunction sampled on [0, D/2]."""

    index: int
    value: float
    z: FloatArray
    samples: FloatArray
    dphi: FloatArray
    parity: Parity
    normalization: Normalization = Normalization.DERIVATIVE_AT_RIGHT
    tolerance: float = 0.0
    method: str = "dense"
    evaluator: Callable[[Any], FloatArray] | None = field(default=None, repr=False)
    sign_changes: int | None = None

    def log_derivative(self, z: Any) -> FloatArray:
        """(log phi)' at arbitrary points of [0, D/2)."""
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        if self.evaluator is not None:
            state = self.evaluator(zz)
            ratio: FloatArray = state[1] / state[0]
            return ratio
        phi = np.interp(zz, self.z, self.samples)
        dphi = np.interp(zz, self.z, self.dphi)
        return np.asarray(dphi / phi, dtype=float)

    def to_dict(self) -> dict[str, Any]:
        """Convert EigenPair summary to dictionary (samples omitted)."""
        data: dict[str, Any] = {
            "index": self.index,
            "value": self.value,
            "parity": self.parity.value,
            "normalization": self.normalization.value,
            "tolerance": self.tolerance,
            "method": self.method,
            "nodes": int(self.z.size),
        }
        if self.sign_changes is not None:
            data["signChanges"] = self.sign_changes
        return data


@dataclass(frozen=True)
class ModelGap:
    """mu1 - mu0 against the 3 pi^2 / D^2 bound."""

    n: int
    D: float
    mu0: float
    mu1: float
    gap: float
    bound: float
    margin: float
    tolerance: float

    @property
    def bound_asserted(self) -> bool:
        return self.n >= 3

    @property
    def passed(self) -> bool:
        return (not self.bound_asserted) or self.margin >= -self.tolerance

    def to_dict(self) -> dict[str, Any]:
        """Convert ModelGap instance to dictionary."""
        return {
            "n": self.n,
            "D": self.D,
            "mu0": self.mu0,
            "mu1": self.mu1,
            "gap": self.gap,
            "bound3Pi2D2": self.bound,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "boundAsserted": self.bound_asserted,
            "passed": self.passed,
        }

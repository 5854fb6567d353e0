"""
Model classes shared by the numerical kernels.

Grids, integrator settings, tridiagonal pencils and integration results.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
import numpy.typing as npt

from ..exceptions import DomainError

FloatArray = npt.NDArray[np.float64]

MIN_INTERIOR_NODES = 8

# Share of the sine map in graded grids; the end spacing is (1 - share) times
# the uniform spacing.
GRADING_SHARE = 0.75


class SpacingKind(Enum):
    """Node distribution of a one-dimensional grid."""

    UNIFORM = "uniform"
    GRADED_RIGHT = "graded-toward-right"


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Strictly increasing nodes on [a, b]."""

    a: float
    b: float
    nodes: FloatArray
    spacing_kind: SpacingKind = SpacingKind.UNIFORM

    def __post_init__(self) -> None:
        nodes = self.nodes
        if nodes.ndim != 1 or nodes.size < MIN_INTERIOR_NODES + 2:
            raise DomainError(
                f"Grid needs at least {MIN_INTERIOR_NODES} interior nodes, "
                f"got {max(nodes.size - 2, 0)}"
            )
        if nodes[0] != self.a or nodes[-1] != self.b:
            raise DomainError("Grid endpoints must equal [a, b]")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("Grid nodes must be strictly increasing")

    @classmethod
    def build(
        cls,
        a: float,
        b: float,
        count: int,
        spacing_kind: SpacingKind = SpacingKind.UNIFORM,
    ) -> "Grid1D":
        """
        Create a grid with ``count`` nodes on [a, b].

        Graded grids blend a uniform parameter with sin(pi*xi/2), which
        clusters nodes near b while keeping the smallest cell a fixed fraction
        of the uniform spacing.
        """
        xi = np.linspace(0.0, 1.0, count)
        if spacing_kind is SpacingKind.GRADED_RIGHT:
            xi = (1.0 - GRADING_SHARE) * xi + GRADING_SHARE * np.sin(0.5 * np.pi * xi)
        nodes = a + (b - a) * xi
        nodes[0] = a
        nodes[-1] = b
        return cls(a=a, b=b, nodes=nodes, spacing_kind=spacing_kind)

    @classmethod
    def for_diameter(cls, D: float, count: int) -> "Grid1D":
        """Half-interval grid [0, D/2], graded toward D/2 when D > 2.8."""
        kind = SpacingKind.GRADED_RIGHT if D > 2.8 else SpacingKind.UNIFORM
        return cls.build(0.0, 0.5 * D, count, kind)

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def spacing(self) -> FloatArray:
        return np.diff(self.nodes)

    def refined(self) -> "Grid1D":
        """Grid with every cell halved in the mapping parameter (nested)."""
        return Grid1D.build(self.a, self.b, 2 * self.size - 1, self.spacing_kind)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for the adaptive Runge-Kutta integrator."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    blowup_threshold: float = 1e8
    first_step: float | None = None

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "max_step", "blowup_threshold"):
            if not getattr(self, name) > 0:
                raise DomainError(f"IntegratorConfig.{name} must be positive")
        if self.first_step is not None and not self.first_step > 0:
            raise DomainError("IntegratorConfig.first_step must be positive")


@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """Symmetric tridiagonal pencil A v = lambda W v with diagonal weight W."""

    diag: FloatArray
    offdiag: FloatArray
    weight: FloatArray

    def __post_init__(self) -> None:
        if self.offdiag.size != self.diag.size - 1:
            raise DomainError("offdiag must have one entry fewer than diag")
        if self.weight.size != self.diag.size:
            raise DomainError("weight must match diag in length")
        if not np.all(self.weight > 0):
            raise DomainError("weights must be strictly positive")

    @property
    def order(self) -> int:
        return int(self.diag.size)

    def matvec(self, v: FloatArray) -> FloatArray:
        """Apply A to v."""
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def norm_inf(self) -> float:
        """Row-sum norm of A."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())


@dataclass(frozen=True)
class BlowupEvent:
    """Location where a trajectory crossed the blow-up threshold."""

    location: float
    sign: int


@dataclass(eq=False)
class Trajectory:
    """Result of one initial-value integration."""

    z: FloatArray
    y: FloatArray
    dense: Callable[[Any], FloatArray] = field(repr=False)
    blowup: BlowupEvent | None = None

    @property
    def z_end(self) -> float:
        return float(self.z[-1])

    @property
    def y_end(self) -> FloatArray:
        result: FloatArray = self.y[:, -1]
        return result

    def __call__(self, z: Any) -> FloatArray:
        return self.dense(z)

"""
Model classes for the parabolic modulus flow.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .numerics import FloatArray, Grid1D


@dataclass(eq=False)
class EvolutionState:
    """psi(., t) and u = psi - psi~_{k,0} on the evolution grid."""

    grid: Grid1D
    t: float
    psi: FloatArray
    u: FloatArray
    k: int
    step_count: int = 0
    dt_last: float = 0.0
    truncation: float = 0.0


@dataclass(eq=False)
class Snapshot:
    """psi at the first accepted time at or after a requested time."""

    requested: float
    t: float
    psi: FloatArray = field(repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {"requested": self.requested, "t": self.t}


@dataclass(eq=False)
class CoefficientSet:
    """Linearisation coefficients a1, a2 of the u-equation."""

    z: FloatArray
    a1: FloatArray
    a2: FloatArray
    mu0: float

    @property
    def bounds(self) -> tuple[float, float]:
        """(sup |a1|, sup |a2|)."""
        return float(np.max(np.abs(self.a1))), float(np.max(np.abs(self.a2)))


@dataclass
class Verdict:
    """Outcome of a diagnostic check."""

    name: str
    passed: bool
    worst_margin: float
    checked: int
    location: tuple[float, float] | None = None
    message: str = ""
    constants: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert Verdict instance to dictionary."""
        result: dict[str, Any] = {
            "name": self.name,
            "passed": self.passed,
            "worstMargin": self.worst_margin,
            "checked": self.checked,
            "message": self.message,
        }
        if self.location is not None:
            result["location"] = {"z": self.location[0], "t": self.location[1]}
        if self.constants:
            result["constants"] = dict(self.constants)
        return result


@dataclass(eq=False)
class ConvergenceReport:
    """Time series and verdicts of one evolution."""

    k: int
    times: list[float]
    sup_errors: list[float]
    max_time_derivative: list[float]
    min_time_derivative: list[float]
    sandwich_lower: list[float]
    sandwich_upper: list[float]
    monotonicity_violations: int
    monotonicity_worst: float
    sandwich_violations: int
    sandwich_worst: float
    stationary_residual_final: float
    converged: bool
    decay_rate: float | None
    strict_delta: float | None
    lipschitz_initial: float
    lipschitz_max: float
    rejected_steps: int
    final_state: EvolutionState = field(repr=False)
    u_initial: FloatArray = field(repr=False)
    history: list[tuple[float, FloatArray]] = field(default_factory=list, repr=False)
    snapshots: list[Snapshot] = field(default_factory=list, repr=False)

    @property
    def final_sup_error(self) -> float:
        return self.sup_errors[-1] if self.sup_errors else 0.0

    @property
    def passed(self) -> bool:
        return (
            self.converged
            and self.monotonicity_violations == 0
            and self.sandwich_violations == 0
        )

    def rows(self) -> list[tuple[float, ...]]:
        """(t, sup_error, max/min dpsi/dt, sandwich margins) rows."""
        return [
            tuple(float(v) for v in row)
            for row in zip(
                self.times,
                self.sup_errors,
                self.max_time_derivative,
                self.min_time_derivative,
                self.sandwich_lower,
                self.sandwich_upper,
                strict=True,
            )
        ]

    def to_dict(self) -> dict[str, Any]:
        """Convert ConvergenceReport summary to dictionary."""
        return {
            "k": self.k,
            "steps": len(self.times) - 1,
            "tEnd": self.times[-1] if self.times else 0.0,
            "finalSupError": self.final_sup_error,
            "monotonicityViolations": {
                "count": self.monotonicity_violations,
                "worst": self.monotonicity_worst,
            },
            "sandwichViolations": {
                "count": self.sandwich_violations,
                "worst": self.sandwich_worst,
            },
            "stationaryResidualFinal": self.stationary_residual_final,
            "converged": self.converged,
            "decayRate": self.decay_rate,
            "strictDelta": self.strict_delta,
            "lipschitzInitial": self.lipschitz_initial,
            "lipschitzMax": self.lipschitz_max,
            "rejectedSteps": self.rejected_steps,
            "snapshots": [snap.to_dict() for snap in self.snapshots],
            "passed": self.passed,
        }

"""
Model classes for the Pruefer angle and the Robin eigenfunction.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ..exceptions import DomainError
from .numerics import FloatArray, IntegratorConfig
from .spectrum import check_diameter

ROBIN_INTEGRATOR = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)


@dataclass(frozen=True)
class ModelContext:
    """(n, D, mu_0) shared by the Robin, Riccati and evolution stages."""

    n: int
    D: float
    mu0: float
    mu0_tolerance: float = 0.0
    integrator: IntegratorConfig = ROBIN_INTEGRATOR
    c_cap: float = 1e6

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"dimension n must be >= 1, got {self.n}")
        check_diameter(self.D)
        if not self.mu0 > 0:
            raise DomainError(f"mu0 must be positive, got {self.mu0}")

    @property
    def half(self) -> float:
        return 0.5 * self.D

    @property
    def m(self) -> float:
        return 0.5 * (self.n - 1)

    def prufer(self, c: float = 0.0, q0: float = 0.0) -> "PruferProblem":
        """Angle problem for spectral shift c launched at q0."""
        return PruferProblem(n=self.n, D=self.D, mu0=self.mu0, c=c, q0=q0)

    def with_integrator(self, cfg: IntegratorConfig) -> "ModelContext":
        return replace(self, integrator=cfg)


@dataclass(frozen=True)
class PruferProblem:
    """Angle ODE q' = (V~ + c/cos^2 z) cos^2 q - sin^2 q on [0, D/2]."""

    n: int
    D: float
    mu0: float
    c: float = 0.0
    q0: float = 0.0

    def __post_init__(self) -> None:
        check_diameter(self.D)
        if not (-0.5 * math.pi < self.q0 <= 0.5 * math.pi):
            raise DomainError(f"q0 must lie in (-pi/2, pi/2], got {self.q0}")

    @property
    def m(self) -> float:
        return 0.5 * (self.n - 1)

    @property
    def half(self) -> float:
        return 0.5 * self.D


@dataclass(eq=False)
class RobinSolution:
    """Robin eigenfunction with phi(D/2) = eps and phi'(D/2) = -1."""

    eps: float
    c_of_eps: float
    sigma: float
    z: FloatArray
    phi_samples: FloatArray
    dphi_samples: FloatArray
    q_samples: FloatArray
    q_evaluator: Callable[[Any], FloatArray] = field(repr=False)

    @property
    def boundary_residuals(self) -> dict[str, float]:
        """|phi(D/2) - eps|, |phi'(D/2) + 1| and |phi'(0)|."""
        return {
            "phiRight": abs(float(self.phi_samples[-1]) - self.eps),
            "dphiRight": abs(float(self.dphi_samples[-1]) + 1.0),
            "dphiLeft": abs(float(self.dphi_samples[0])),
        }

    def rows(self, m: float) -> list[tuple[float, ...]]:
        """(z, phi, dphi, q, psi) rows for CSV emission."""
        psi = m * np.tan(self.z) + np.tan(self.q_samples)
        return [
            (float(a), float(b), float(c), float(d), float(e))
            for a, b, c, d, e in zip(
                self.z,
                self.phi_samples,
                self.dphi_samples,
                self.q_samples,
                psi,
                strict=True,
            )
        ]

    def to_dict(self) -> dict[str, Any]:
        """Convert RobinSolution summary to dictionary."""
        return {
            "eps": self.eps,
            "cOfEps": self.c_of_eps,
            "sigma": self.sigma,
            "phiMin": float(np.min(self.phi_samples)),
            "boundaryResiduals": self.boundary_residuals,
        }

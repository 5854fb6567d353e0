"""
Model classes for Riccati branches and moduli of log-concavity.

Every branch solves

    psi' + psi^2 - (n-1) tan(z) psi + mu0 = c / cos^2(z)

on its domain; a modulus is the pointwise minimum of such branches.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .numerics import FloatArray


class Side(Enum):
    """Which end the branch is launched from."""

    L = "L"  # psi(0) = 0, forward
    R = "R"  # psi(D/2) = -k, backward


def riccati_slope(
    n: int, mu0: float, c: float, z: Any, psi: Any
) -> FloatArray:
    """psi' from the stationary Riccati equation."""
    zz = np.asarray(z, dtype=float)
    pp = np.asarray(psi, dtype=float)
    slope: FloatArray = (
        c / np.cos(zz) ** 2 - pp**2 + (n - 1) * np.tan(zz) * pp - mu0
    )
    return slope


def riccati_curvature(
    n: int, mu0: float, c: float, z: Any, psi: Any
) -> FloatArray:
    """psi'' obtained by differentiating the stationary Riccati equation."""
    zz = np.asarray(z, dtype=float)
    pp = np.asarray(psi, dtype=float)
    slope = riccati_slope(n, mu0, c, zz, pp)
    sec2 = 1.0 / np.cos(zz) ** 2
    curvature: FloatArray = (
        2.0 * c * np.tan(zz) * sec2
        - 2.0 * pp * slope
        + (n - 1) * (sec2 * pp + np.tan(zz) * slope)
    )
    return curvature


@dataclass(eq=False)
class RiccatiCurve:
    """One solution branch of the stationary Riccati equation."""

    side: Side
    c: float
    n: int
    mu0: float
    z: FloatArray
    samples: FloatArray
    evaluator: Callable[[Any], FloatArray] = field(repr=False)
    k: int | None = None
    blowup_z: float | None = None

    def __call__(self, z: Any) -> FloatArray:
        """Branch values; +inf at and below the blow-up point."""
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.full(zz.shape, np.inf)
        if self.blowup_z is None:
            inside = np.ones(zz.shape, dtype=bool)
        else:
            inside = zz > self.blowup_z
        if np.any(inside):
            out[inside] = self.evaluator(zz[inside])
        return out

    def slope(self, z: Any) -> FloatArray:
        return riccati_slope(self.n, self.mu0, self.c, z, self(z))

    def curvature(self, z: Any) -> FloatArray:
        return riccati_curvature(self.n, self.mu0, self.c, z, self(z))

    def to_dict(self) -> dict[str, Any]:
        """Convert RiccatiCurve summary to dictionary."""
        return {
            "side": self.side.value,
            "c": self.c,
            "k": self.k,
            "blowupZ": self.blowup_z,
        }


@dataclass(eq=False)
class PSubstitution:
    """p = psi - (n-1)/2 tan z with p' + p^2 = V."""

    z: FloatArray
    p_samples: FloatArray
    v_samples: FloatArray
    k_tilde: float
    v_inf: float
    v_sup: float
    residual: float


@dataclass(eq=False)
class Envelope:
    """Closed-form comparison curve with its validity range."""

    name: str
    z: FloatArray
    values: FloatArray
    valid_from: float
    valid_to: float
    parameter: float  # the lambda entering the formula


@dataclass(eq=False)
class EnvelopeSet:
    """Upper envelopes for the shifted branches and their lower envelopes."""

    upper_left: Envelope
    upper_right: Envelope
    lower_left: Envelope
    lower_right: Envelope

    def all(self) -> list[Envelope]:
        return [self.upper_left, self.upper_right, self.lower_left, self.lower_right]


@dataclass(eq=False)
class SupersolutionProfile:
    """min(psi^L_{c+s}, psi^R_{k,c-s}) with c = c(1/k)."""

    k: int
    s: float
    z: FloatArray
    samples: FloatArray
    crossing_z: float | None
    left: RiccatiCurve = field(repr=False)
    right: RiccatiCurve = field(repr=False)

    def __call__(self, z: Any) -> FloatArray:
        result: FloatArray = np.minimum(self.left(z), self.right(z))
        return result


@dataclass(eq=False)
class ModulusProfile:
    """Piecewise-smooth modulus: the minimum of a set of Riccati branches."""

    k: int
    z: FloatArray
    samples: FloatArray
    kinks: list[float]
    kink_jumps: list[float]
    lipschitz_const: float
    pieces: Sequence[RiccatiCurve] = field(repr=False)

    def _stack(self, z: Any) -> FloatArray:
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        return np.vstack([piece(zz) for piece in self.pieces])

    def __call__(self, z: Any) -> FloatArray:
        result: FloatArray = np.min(self._stack(z), axis=0)
        return result

    def active_index(self, z: Any) -> np.ndarray:
        """Index of the piece attaining the minimum at each point."""
        return np.argmin(self._stack(z), axis=0)

    def _by_piece(self, z: Any, name: str) -> FloatArray:
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        active = self.active_index(zz)
        out = np.empty(zz.shape)
        for i, piece in enumerate(self.pieces):
            mask = active == i
            if np.any(mask):
                out[mask] = getattr(piece, name)(zz[mask])
        return out

    def derivative(self, z: Any) -> FloatArray:
        """Piecewise derivative (the active piece's slope)."""
        return self._by_piece(z, "slope")

    def second_derivative(self, z: Any) -> FloatArray:
        return self._by_piece(z, "curvature")

    def rows(self) -> list[tuple[float, float, int]]:
        """(z, psi, active piece) rows for CSV emission."""
        active = self.active_index(self.z)
        return [
            (float(a), float(b), int(c))
            for a, b, c in zip(self.z, self.samples, active, strict=True)
        ]

    def to_dict(self) -> dict[str, Any]:
        """Convert ModulusProfile summary to dictionary."""
        return {
            "k": self.k,
            "kinks": list(self.kinks),
            "kinkJumps": list(self.kink_jumps),
            "lipschitzConst": self.lipschitz_const,
            "pieces": [piece.to_dict() for piece in self.pieces],
        }


@dataclass
class ShiftSearch:
    """Outcome of the s(k) search."""

    k: int
    s: float
    evaluations: int
    spot_checks: list[tuple[float, bool]] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(passed for _, passed in self.spot_checks)

    def to_dict(self) -> dict[str, Any]:
        """Convert ShiftSearch instance to dictionary."""
        return {
            "k": self.k,
            "s": self.s,
            "evaluations": self.evaluations,
            "spotChecks": [[s, ok] for s, ok in self.spot_checks],
            "monotone": self.monotone,
        }

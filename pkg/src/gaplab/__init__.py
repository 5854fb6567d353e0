"""
gaplab: fundamental gap computations for convex domains in the sphere.

The package computes the spectrum of the one-dimensional model operator
phi'' - (n-1) tan(z) phi' on [-D/2, D/2], builds the Robin eigenfunction and
the Riccati moduli of log-concavity derived from it, runs the parabolic flow
that improves an initial modulus to the stationary one, and checks the gap
chain lambda_1 - lambda_0 >= mu_1 - mu_0 >= 3 pi^2/D^2 on geodesic balls.

Basic Usage:
    from gaplab import ModelProblem, model_gap

    gap = model_gap(ModelProblem.create(n=3, D=2.0))
    print(gap.gap, gap.bound, gap.passed)

Command line:
    gaplab eigen --n 3 --D 2
    gaplab flow --n 2 --D 2 --k 2 --out results
"""

__version__ = "0.1.0"

from .exceptions import (
    BoundViolationError,
    BracketError,
    ConfigValidationError,
    DomainError,
    EigensolverError,
    GapLabError,
    IntegrationError,
    SearchCapError,
)
from .models import (
    CapProblem,
    ConvergenceReport,
    EigenPair,
    Grid1D,
    ModelContext,
    ModelGap,
    ModelProblem,
    ModulusProfile,
    RunConfig,
)
from .sl_spectrum import model_gap, solve_spectrum_dense, solve_spectrum_shooting

__all__ = [
    # Exceptions
    "GapLabError",
    "IntegrationError",
    "EigensolverError",
    "BracketError",
    "DomainError",
    "SearchCapError",
    "BoundViolationError",
    "ConfigValidationError",
    # Models
    "CapProblem",
    "ConvergenceReport",
    "EigenPair",
    "Grid1D",
    "ModelContext",
    "ModelGap",
    "ModelProblem",
    "ModulusProfile",
    "RunConfig",
    # Model spectrum
    "model_gap",
    "solve_spectrum_dense",
    "solve_spectrum_shooting",
]

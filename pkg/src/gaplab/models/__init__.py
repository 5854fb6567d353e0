"""
Model classes for gaplab.

Value types shared between the numerical stages and the harness.
"""

from .cap import CapProblem, GapChainReport, RadialEigen, TwoPointSample
from .config import RunConfig, RunManifest
from .evolution import (
    CoefficientSet,
    ConvergenceReport,
    EvolutionState,
    Snapshot,
    Verdict,
)
from .modulus import (
    Envelope,
    EnvelopeSet,
    ModulusProfile,
    PSubstitution,
    RiccatiCurve,
    ShiftSearch,
    Side,
    SupersolutionProfile,
)
from .numerics import (
    BlowupEvent,
    Grid1D,
    IntegratorConfig,
    SpacingKind,
    Trajectory,
    TridiagonalSystem,
)
from .robin import ModelContext, PruferProblem, RobinSolution
from .spectrum import EigenPair, ModelGap, ModelProblem, Normalization, Parity

__all__ = [
    # Numerics
    "BlowupEvent",
    "Grid1D",
    "IntegratorConfig",
    "SpacingKind",
    "Trajectory",
    "TridiagonalSystem",
    # Model spectrum
    "EigenPair",
    "ModelGap",
    "ModelProblem",
    "Normalization",
    "Parity",
    # Robin
    "ModelContext",
    "PruferProblem",
    "RobinSolution",
    # Moduli
    "Envelope",
    "EnvelopeSet",
    "ModulusProfile",
    "PSubstitution",
    "RiccatiCurve",
    "ShiftSearch",
    "Side",
    "SupersolutionProfile",
    # Evolution
    "CoefficientSet",
    "ConvergenceReport",
    "EvolutionState",
    "Snapshot",
    "Verdict",
    # Balls
    "CapProblem",
    "GapChainReport",
    "RadialEigen",
    "TwoPointSample",
    # Runs
    "RunConfig",
    "RunManifest",
]

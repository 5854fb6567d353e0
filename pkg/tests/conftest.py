"""Pytest configuration and shared fixtures."""

from pathlib import Path

import pytest

from gaplab.models import Grid1D, ModelContext, ModelProblem, ModulusProfile
from gaplab.parabolic_evolver import ParabolicEvolver, evolution_grid
from gaplab.prufer_robin import build_context
from gaplab.riccati_modulus import ModulusFamily

# Coarse resolutions keep the unit suite fast; accuracy checks scale with them.
TEST_NODES = 401
EVOLUTION_NODES = 201


@pytest.fixture(scope="session")
def problem_n2() -> ModelProblem:
    """Model problem n=2, D=2 on a coarse grid."""
    return ModelProblem.create(n=2, D=2.0, nodes=TEST_NODES)


@pytest.fixture(scope="session")
def ctx_n2(problem_n2: ModelProblem) -> ModelContext:
    """Model context (n=2, D=2) with mu0 from shooting."""
    return build_context(problem_n2)


@pytest.fixture(scope="session")
def grid_n2(problem_n2: ModelProblem) -> Grid1D:
    return problem_n2.grid


@pytest.fixture(scope="session")
def family_n2(ctx_n2: ModelContext, grid_n2: Grid1D) -> ModulusFamily:
    """Modulus family without a ball oracle; every shift is the floor 0.5."""
    return ModulusFamily(ctx_n2, grid_n2, s_floor=0.5)


@pytest.fixture(scope="session")
def initial_k2(family_n2: ModulusFamily) -> ModulusProfile:
    return family_n2.initial(2)


@pytest.fixture(scope="session")
def tilde_k2(family_n2: ModulusFamily) -> ModulusProfile:
    return family_n2.stationary(2)


@pytest.fixture(scope="session")
def evolver_k2(ctx_n2: ModelContext, tilde_k2: ModulusProfile) -> ParabolicEvolver:
    """Evolver for k=2 on a uniform 201-node grid."""
    return ParabolicEvolver(ctx_n2, evolution_grid(ctx_n2, EVOLUTION_NODES), tilde_k2)


@pytest.fixture
def output_dir(tmp_path: Path) -> Path:
    """Fresh output directory for a pipeline run."""
    return tmp_path / "out"

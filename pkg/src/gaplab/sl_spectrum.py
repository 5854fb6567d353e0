"""
First two eigenvalues of the one-dimensional model operator.

The operator phi'' - (n-1) tan(z) phi' on [-D/2, D/2] with Dirichlet ends is
self-adjoint with weight cos^(n-1)(z):

    (cos^(n-1) phi')' = -mu cos^(n-1) phi

The dense oracle discretizes that form on the full interval as a symmetric
tridiagonal pencil. The shooting solver uses the even/odd reduction to
[0, D/2] and brackets its roots with the dense values.
"""

import logging
import math

import numpy as np

from .exceptions import IntegrationError
from .models.numerics import (
    FloatArray,
    Grid1D,
    IntegratorConfig,
    Trajectory,
    TridiagonalSystem,
)
from .models.spectrum import EigenPair, ModelGap, ModelProblem, Normalization, Parity
from .numerics_core import (
    eig_rounding_bound,
    eig_sym_tridiag,
    find_root,
    integrate_ivp,
)

logger = logging.getLogger(__name__)

SHOOTING_INTEGRATOR = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)

COARSE_NODES = 401


def model_system(n: int, grid: Grid1D) -> tuple[FloatArray, TridiagonalSystem]:
    """
    Weighted pencil for the full interval mirrored from a half grid.

    Returns:
        Full node array on [-D/2, D/2] and the pencil on its interior nodes
    """
    half = grid.nodes
    full = np.concatenate((-half[:0:-1], half))
    h = np.diff(full)
    mid = 0.5 * (full[:-1] + full[1:])
    flux = np.cos(mid) ** (n - 1) / h
    diag = flux[:-1] + flux[1:]
    offdiag = -flux[1:-1]
    weight = np.cos(full[1:-1]) ** (n - 1) * 0.5 * (h[:-1] + h[1:])
    return full, TridiagonalSystem(diag=diag, offdiag=offdiag, weight=weight)


def dense_full_modes(
    prob: ModelProblem, count: int
) -> list[tuple[float, FloatArray, FloatArray]]:
    """
    Unextrapolated dense eigenpairs on the full interval.

    Returns:
        (mu, full nodes, eigenvector including the zero end values) per mode
    """
    full, system = model_system(prob.n, prob.grid)
    modes = []
    for value, vec in eig_sym_tridiag(system, count):
        modes.append((value, full, np.concatenate(([0.0], vec, [0.0]))))
    return modes


def dense_rounding(prob: ModelProblem) -> float:
    """Rounding floor of the dense eigenvalues on the grid of ``prob``."""
    return eig_rounding_bound(model_system(prob.n, prob.grid)[1])


def count_sign_changes(values: FloatArray, rel_floor: float = 1e-10) -> int:
    """Sign changes of a sampled function, ignoring entries near zero."""
    scale = float(np.max(np.abs(values)))
    signs = np.sign(values[np.abs(values) > rel_floor * scale])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _parity_of(vec: FloatArray) -> Parity:
    mirror = vec[::-1]
    even_err = float(np.max(np.abs(vec - mirror)))
    odd_err = float(np.max(np.abs(vec + mirror)))
    return Parity.EVEN if even_err <= odd_err else Parity.ODD


def _normalize(
    phi: FloatArray, dphi: FloatArray, normalization: Normalization
) -> float:
    if normalization is Normalization.DERIVATIVE_AT_RIGHT:
        return -1.0 / float(dphi[-1])
    return 1.0 / float(np.max(np.abs(phi)))


def solve_spectrum_dense(
    prob: ModelProblem,
    count: int,
    normalization: Normalization = Normalization.DERIVATIVE_AT_RIGHT,
    extrapolate: bool = True,
) -> list[EigenPair]:
    """
    Dense oracle for mu_0 (and mu_1) of the model operator.

    With ``extrapolate`` the problem is also solved on the nested refined
    grid; the reported value is the Richardson combination and the certified
    tolerance is |mu(N) - mu(2N)| * 4/3 plus the eigensolver's rounding
    floor on the refined grid. Each mode records the sign changes of its
    full-interval eigenvector; mode i should have exactly i.

    Args:
        prob: Model problem; its grid sets the coarse resolution
        count: 1 or 2 eigenpairs
        normalization: Scaling convention for the returned samples
        extrapolate: Combine with the refined grid

    Returns:
        Eigenpairs in ascending order, sampled on prob.grid

    Raises:
        ValueError: If count is not 1 or 2
        EigensolverError: Propagated from the tridiagonal solver
    """
    if count not in (1, 2):
        raise ValueError(f"count must be 1 or 2, got {count}")

    modes = dense_full_modes(prob, count)
    refined: list[tuple[float, FloatArray, FloatArray]] = []
    rounding = 0.0
    if extrapolate:
        fine_prob = prob.with_grid(prob.grid.refined())
        refined = dense_full_modes(fine_prob, count)
        rounding = dense_rounding(fine_prob)

    centre = prob.grid.size - 1
    pairs = []
    for index, (value, _, vec) in enumerate(modes):
        parity = _parity_of(vec)
        expected = Parity.EVEN if index == 0 else Parity.ODD
        if parity is not expected:
            logger.warning(
                f"Mode {index} for n={prob.n}, D={prob.D} has parity "
                f"{parity.value}, expected {expected.value}"
            )
        sign_changes = count_sign_changes(vec)
        if sign_changes != index:
            logger.warning(
                f"Mode {index} for n={prob.n}, D={prob.D} has {sign_changes} "
                f"sign changes, expected {index}"
            )

        half = vec[centre:].copy()
        if np.sum(half) < 0:
            half = -half
        dphi = np.gradient(half, prob.grid.nodes, edge_order=2)
        scale = _normalize(half, dphi, normalization)

        mu = value
        tolerance = 0.0
        if extrapolate:
            fine = refined[index][0]
            mu = (4.0 * fine - value) / 3.0
            tolerance = abs(value - fine) * 4.0 / 3.0 + rounding

        pairs.append(
            EigenPair(
                index=index,
                value=float(mu),
                z=prob.grid.nodes,
                samples=half * scale,
                dphi=dphi * scale,
                parity=parity,
                normalization=normalization,
                tolerance=float(tolerance),
                method="dense",
                sign_changes=sign_changes,
            )
        )
        logger.debug(
            f"Dense mu_{index}(n={prob.n}, D={prob.D}) = {mu:.12g} "
            f"(tol {tolerance:.2e})"
        )
    return pairs


def interlacing_bracket(mu0: float, mu1: float, index: int) -> tuple[float, float]:
    """
    Shooting bracket for mode ``index`` from estimates of mu_0 and mu_1.

    The even launch changes sign at mu_0, mu_2, ... and is positive at 0, so
    (0, mu_1) holds only mu_0. The odd launch changes sign at mu_1, mu_3, ...;
    the midpoint of mu_0 and mu_1 lies below mu_1 and 2 mu_1 - mu_0 below
    mu_3.
    """
    if index == 0:
        return 0.0, mu1
    return 0.5 * (mu0 + mu1), 2.0 * mu1 - mu0


def _dense_bracket(prob: ModelProblem, index: int) -> tuple[float, float]:
    coarse = prob.with_grid(Grid1D.for_diameter(prob.D, COARSE_NODES))
    mu0, mu1 = (p.value for p in solve_spectrum_dense(coarse, 2, extrapolate=False))
    return interlacing_bracket(mu0, mu1, index)


def solve_spectrum_shooting(
    prob: ModelProblem,
    index: int,
    bracket: tuple[float, float] | None = None,
    normalization: Normalization = Normalization.DERIVATIVE_AT_RIGHT,
    cfg: IntegratorConfig = SHOOTING_INTEGRATOR,
) -> EigenPair:
    """
    Shoot from z = 0 to D/2 and root-find the endpoint value.

    Index 0 launches with phi(0) = 1, phi'(0) = 0; index 1 with phi(0) = 0,
    phi'(0) = 1. When no bracket is given one is built by
    :func:`interlacing_bracket` from a coarse dense solve.

    Raises:
        ValueError: If index is not 0 or 1
        BracketError: If the bracket holds no sign change
        IntegrationError: If the shot blows up before D/2
    """
    if index not in (0, 1):
        raise ValueError(f"index must be 0 or 1, got {index}")
    if bracket is None:
        bracket = _dense_bracket(prob, index)

    n1 = prob.n - 1
    y0 = (1.0, 0.0) if index == 0 else (0.0, 1.0)

    def shoot(mu: float) -> Trajectory:
        def rhs(z: float, y: FloatArray) -> list[float]:
            return [y[1], n1 * math.tan(z) * y[1] - mu * y[0]]

        traj = integrate_ivp(rhs, 0.0, prob.half, y0, cfg)
        if traj.blowup is not None:
            raise IntegrationError(
                "integration failure near right endpoint",
                location=traj.blowup.location,
            )
        return traj

    def mismatch(mu: float) -> float:
        return float(shoot(mu).y_end[0])

    lo, hi = bracket
    mu = find_root(mismatch, lo, hi, tol=1e-13 * max(1.0, abs(hi)))
    traj = shoot(mu)
    state = traj(prob.grid.nodes)
    phi, dphi = state[0], state[1]
    scale = _normalize(phi, dphi, normalization)

    def evaluator(z: object) -> FloatArray:
        return np.asarray(traj(z), dtype=float) * scale

    logger.debug(f"Shooting mu_{index}(n={prob.n}, D={prob.D}) = {mu:.14g}")
    return EigenPair(
        index=index,
        value=mu,
        z=prob.grid.nodes,
        samples=phi * scale,
        dphi=dphi * scale,
        parity=Parity.EVEN if index == 0 else Parity.ODD,
        normalization=normalization,
        tolerance=10.0 * cfg.rel_tol * mu,
        method="shooting",
        evaluator=evaluator,
    )


def model_gap(prob: ModelProblem) -> ModelGap:
    """
    mu_1 - mu_0 and its margin over 3 pi^2 / D^2.

    Shooting values are reported; the tolerance combines the dense oracle's
    certified bound with the shooting/dense disagreement for each eigenvalue.
    """
    return model_gap_with_pairs(prob)[0]


def model_gap_with_pairs(
    prob: ModelProblem,
) -> tuple[ModelGap, list[EigenPair], list[EigenPair]]:
    """model_gap plus the dense and shooting eigenpairs behind it."""
    dense = solve_spectrum_dense(prob, 2)
    tolerance = 0.0
    values = []
    shots = []
    for pair in dense:
        bracket = interlacing_bracket(dense[0].value, dense[1].value, pair.index)
        shot = solve_spectrum_shooting(prob, pair.index, bracket)
        tolerance += max(pair.tolerance, abs(shot.value - pair.value))
        values.append(shot.value)
        shots.append(shot)

    mu0, mu1 = values
    gap = mu1 - mu0
    bound = 3.0 * math.pi**2 / prob.D**2
    result = ModelGap(
        n=prob.n,
        D=prob.D,
        mu0=mu0,
        mu1=mu1,
        gap=gap,
        bound=bound,
        margin=gap - bound,
        tolerance=tolerance,
    )
    if not result.passed:
        logger.warning(
            f"Model gap bound failed for n={prob.n}, D={prob.D}: "
            f"margin {result.margin:.3e} < -{tolerance:.3e}"
        )
    return result, dense, shots

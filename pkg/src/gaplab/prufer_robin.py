"""
Pruefer shooting for the Robin eigenfunction of the model operator.

With m = (n-1)/2 and

    V~(z) = [(n-1)(n-3)/cos^2 z - (n-1)^2 - 4 mu0] / 4

the angle q of w = cos^m(z) phi satisfies

    q' = (V~ + c/cos^2 z) cos^2 q - sin^2 q,   q(0) = q0.

For eps > 0 the shift c(eps) is the unique c > 0 with
q(D/2, 0, c) = arctan(sigma) - pi/2, sigma = eps / (1 + eps m tan(D/2)).
The Robin eigenfunction is rebuilt from q and its logarithmic derivative at
eps = 1/k is the stationary modulus psi~_{k,0}.
"""

import logging
import math
from typing import Any

import numpy as np

from .exceptions import BoundViolationError, DomainError, SearchCapError
from .models.modulus import ModulusProfile, RiccatiCurve, Side
from .models.numerics import FloatArray, Grid1D, Trajectory
from .models.robin import ModelContext, PruferProblem, RobinSolution
from .models.spectrum import ModelProblem
from .numerics_core import find_root, integrate_ivp
from .sl_spectrum import solve_spectrum_shooting

logger = logging.getLogger(__name__)

C_TOLERANCE = 1e-14


def build_context(prob: ModelProblem, c_cap: float = 1e6) -> ModelContext:
    """Solve mu_0 by shooting and wrap it with (n, D)."""
    pair = solve_spectrum_shooting(prob, 0)
    return ModelContext(
        n=prob.n, D=prob.D, mu0=pair.value, mu0_tolerance=pair.tolerance, c_cap=c_cap
    )


def v_tilde(prob: PruferProblem, z: Any) -> Any:
    """V~(z) = [(n-1)(n-3)/cos^2 z - (n-1)^2 - 4 mu0] / 4."""
    n = prob.n
    return 0.25 * (
        (n - 1) * (n - 3) / np.cos(z) ** 2 - (n - 1) ** 2 - 4.0 * prob.mu0
    )


def integrate_prufer(
    prob: PruferProblem,
    ctx: ModelContext | None = None,
    with_integral: bool = False,
) -> Trajectory:
    """
    Integrate the angle ODE over [0, D/2].

    Args:
        prob: Angle problem (n, D, mu0, c, q0)
        ctx: Supplies integrator settings; defaults are used without it
        with_integral: Append the running integral of tan(q) as a second
            state component

    Returns:
        Angle trajectory (and integral when requested)
    """
    c = prob.c

    def rhs(z: float, y: FloatArray) -> list[float]:
        q = y[0]
        cos_q = math.cos(q)
        dq = (float(v_tilde(prob, z)) + c / math.cos(z) ** 2) * cos_q * cos_q - (
            math.sin(q) ** 2
        )
        if with_integral:
            return [dq, math.tan(q)]
        return [dq]

    y0 = [prob.q0, 0.0] if with_integral else [prob.q0]
    if ctx is None:
        return integrate_ivp(rhs, 0.0, prob.half, y0)
    return integrate_ivp(rhs, 0.0, prob.half, y0, ctx.integrator)


def robin_sigma(eps: float, ctx: ModelContext) -> float:
    """sigma = eps / (1 + eps m tan(D/2))."""
    return eps / (1.0 + eps * ctx.m * math.tan(ctx.half))


def solve_c_of_eps(eps: float, ctx: ModelContext) -> float:
    """
    Spectral shift c(eps) of the Robin eigenfunction.

    The bracket starts at [0, 1] and its upper end doubles until the target
    angle is bracketed.

    Raises:
        DomainError: If eps is not positive
        SearchCapError: If the upper end passes ctx.c_cap
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")

    target = math.atan(robin_sigma(eps, ctx)) - 0.5 * math.pi

    def mismatch(c: float) -> float:
        traj = integrate_prufer(ctx.prufer(c), ctx)
        return float(traj.y_end[0]) - target

    hi = 1.0
    while mismatch(hi) < 0.0:
        hi *= 2.0
        if hi > ctx.c_cap:
            raise SearchCapError(
                f"c search cap exceeded; raise cap (eps={eps}, cap={ctx.c_cap})"
            )

    c = find_root(mismatch, 0.0, hi, tol=C_TOLERANCE)
    residual = abs(mismatch(c))
    if residual > 1e-9:
        logger.warning(f"c({eps}) = {c} leaves angle residual {residual:.2e}")
    logger.debug(f"c({eps:.6g}) = {c:.14g} for n={ctx.n}, D={ctx.D}")
    return c


def check_c_monotonicity(
    eps_values: list[float], ctx: ModelContext
) -> tuple[list[float], bool]:
    """
    c(eps) over increasing eps and whether it is strictly increasing.

    A failure is logged, not raised: uniqueness of c(eps) rests on this
    monotonicity and the search cannot confirm it globally.
    """
    ordered = sorted(eps_values)
    values = [solve_c_of_eps(eps, ctx) for eps in ordered]
    increasing = all(a < b for a, b in zip(values, values[1:], strict=False))
    if not increasing:
        logger.warning(f"c(eps) not strictly increasing over {ordered}: {values}")
    return values, increasing


def reconstruct_robin(
    eps: float, ctx: ModelContext, grid: Grid1D, c: float | None = None
) -> RobinSolution:
    """
    Rebuild the Robin eigenfunction from the angle trajectory.

    phi(z) = eps (cos(D/2)/cos z)^m exp(-int_z^{D/2} tan q) and
    phi'(z) = [m tan z + tan q(z)] phi(z).

    Raises:
        BoundViolationError: If phi is not positive or q touches +-pi/2
    """
    if c is None:
        c = solve_c_of_eps(eps, ctx)
    if not c > 0:
        logger.warning(f"c({eps}) = {c} is not positive")

    traj = integrate_prufer(ctx.prufer(c), ctx, with_integral=True)
    z = grid.nodes
    state = traj(z)
    q, running = state[0], state[1]
    m = ctx.m
    phi = (
        eps
        * (math.cos(ctx.half) / np.cos(z)) ** m
        * np.exp(-(running[-1] - running))
    )
    dphi = (m * np.tan(z) + np.tan(q)) * phi

    if not np.all(phi > 0):
        raise BoundViolationError(f"Robin eigenfunction not positive for eps={eps}")
    if np.any(np.abs(q[1:-1]) >= 0.5 * math.pi):
        raise BoundViolationError(f"Pruefer angle left (-pi/2, pi/2) for eps={eps}")

    def q_evaluator(zz: Any) -> FloatArray:
        return np.asarray(traj(zz)[0], dtype=float)

    return RobinSolution(
        eps=eps,
        c_of_eps=c,
        sigma=robin_sigma(eps, ctx),
        z=z,
        phi_samples=phi,
        dphi_samples=dphi,
        q_samples=q,
        q_evaluator=q_evaluator,
    )


def robin_residual(
    sol: RobinSolution, ctx: ModelContext, method: str = "analytic"
) -> float:
    """
    Sup-norm residual of phi'' - (n-1) tan z phi' + mu0 phi - c/cos^2 z phi.

    ``analytic`` differentiates phi' through the angle ODE; ``finite-difference``
    takes a second-order difference of the sampled phi'.
    """
    z = sol.z
    phi, dphi, q = sol.phi_samples, sol.dphi_samples, sol.q_samples
    if method == "analytic":
        dq = (v_tilde(ctx.prufer(sol.c_of_eps), z) + sol.c_of_eps / np.cos(z) ** 2) * (
            np.cos(q) ** 2
        ) - np.sin(q) ** 2
        ddphi = (ctx.m / np.cos(z) ** 2 + dq / np.cos(q) ** 2) * phi + (
            ctx.m * np.tan(z) + np.tan(q)
        ) * dphi
    elif method == "finite-difference":
        ddphi = np.gradient(dphi, z, edge_order=2)
    else:
        raise ValueError(f"Unknown residual method: {method}")

    residual = (
        ddphi
        - (ctx.n - 1) * np.tan(z) * dphi
        + ctx.mu0 * phi
        - sol.c_of_eps / np.cos(z) ** 2 * phi
    )
    return float(np.max(np.abs(residual)))


def tilde_psi_k0(
    k: int, ctx: ModelContext, grid: Grid1D, c: float | None = None
) -> ModulusProfile:
    """
    Stationary modulus psi~_{k,0} = (log phi~_{0,1/k})'.

    Evaluated anywhere through the dense angle trajectory as
    m tan z + tan q(z); its slope comes from the stationary Riccati equation.

    Raises:
        DomainError: If k < 1
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if c is None:
        c = solve_c_of_eps(1.0 / k, ctx)

    traj = integrate_prufer(ctx.prufer(c), ctx)
    m = ctx.m

    def evaluator(z: Any) -> FloatArray:
        zz = np.asarray(z, dtype=float)
        return np.asarray(m * np.tan(zz) + np.tan(traj(zz)[0]), dtype=float)

    samples = evaluator(grid.nodes)
    curve = RiccatiCurve(
        side=Side.L,
        c=c,
        n=ctx.n,
        mu0=ctx.mu0,
        z=grid.nodes,
        samples=samples,
        evaluator=evaluator,
        k=k,
    )
    boundary = abs(float(samples[-1]) + k)
    if boundary > 1e-6:
        logger.warning(f"psi~_{{{k},0}}(D/2) misses -k by {boundary:.2e}")

    lipschitz = float(np.max(np.abs(np.diff(samples) / grid.spacing)))
    return ModulusProfile(
        k=k,
        z=grid.nodes,
        samples=samples,
        kinks=[],
        kink_jumps=[],
        lipschitz_const=lipschitz,
        pieces=[curve],
    )

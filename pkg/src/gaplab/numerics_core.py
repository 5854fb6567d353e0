"""
Shared numerical kernels for gaplab.

Adaptive Runge-Kutta integration with blow-up detection, the weighted
symmetric tridiagonal eigensolver and bracketed root finding. Every function
here is pure; nothing is cached between calls.
"""

import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.optimize import brentq

from .exceptions import BracketError, EigensolverError, IntegrationError
from .models.numerics import (
    BlowupEvent,
    FloatArray,
    IntegratorConfig,
    Trajectory,
    TridiagonalSystem,
)

logger = logging.getLogger(__name__)

RhsFunction = Callable[[float, FloatArray], Any]

DEFAULT_INTEGRATOR = IntegratorConfig()


def integrate_ivp(
    rhs: RhsFunction,
    z0: float,
    z1: float,
    y0: Sequence[float] | FloatArray,
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
) -> Trajectory:
    """
    Integrate y' = rhs(z, y) from z0 to z1 with RK45 (Dormand-Prince).

    Integration may run backwards (z1 < z0). When any component reaches
    ``cfg.blowup_threshold`` in magnitude the run stops and the returned
    trajectory carries a :class:`BlowupEvent`.

    Args:
        rhs: Right-hand side, called with a scalar z and the state vector
        z0: Start of the integration interval
        z1: End of the integration interval
        y0: Initial state
        cfg: Tolerances and thresholds

    Returns:
        Trajectory with accepted steps and a dense interpolant

    Raises:
        ValueError: If z0 == z1
        IntegrationError: On step-size underflow ("stiffness failure") or a
            non-finite right-hand side ("invalid evaluation")
    """
    if z0 == z1:
        raise ValueError("Integration interval must have nonzero length")

    state0 = np.atleast_1d(np.asarray(y0, dtype=float))
    threshold = cfg.blowup_threshold

    def fun(z: float, y: FloatArray) -> FloatArray:
        value = np.asarray(rhs(z, y), dtype=float)
        if not np.all(np.isfinite(value)):
            raise IntegrationError(f"invalid evaluation at z={z:.12g}", location=z)
        return value

    def blowup(z: float, y: FloatArray) -> float:
        return float(threshold - np.max(np.abs(y)))

    blowup.terminal = True  # type: ignore[attr-defined]

    options: dict[str, Any] = {}
    if cfg.first_step is not None:
        options["first_step"] = min(cfg.first_step, abs(z1 - z0))

    sol = solve_ivp(
        fun,
        (z0, z1),
        state0,
        method="RK45",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=True,
        events=blowup,
        **options,
    )

    event: BlowupEvent | None = None
    if sol.status == 1 and sol.t_events[0].size:
        y_event = sol.y_events[0][0]
        worst = int(np.argmax(np.abs(y_event)))
        event = BlowupEvent(
            location=float(sol.t_events[0][0]), sign=int(np.sign(y_event[worst]))
        )
        logger.debug(f"Blow-up detected at z={event.location:.10g}")
    elif sol.status == -1:
        y_last = sol.y[:, -1]
        worst = int(np.argmax(np.abs(y_last)))
        if abs(y_last[worst]) >= np.sqrt(threshold):
            event = BlowupEvent(
                location=float(sol.t[-1]), sign=int(np.sign(y_last[worst]))
            )
            logger.debug(
                f"Step underflow at |y|={abs(y_last[worst]):.3g}, "
                f"treated as blow-up at z={event.location:.10g}"
            )
        else:
            raise IntegrationError(
                f"stiffness failure: {sol.message}", location=float(sol.t[-1])
            )

    return Trajectory(z=sol.t, y=sol.y, dense=sol.sol, blowup=event)


def eig_sym_tridiag(
    sys: TridiagonalSystem, count: int, residual_tol: float = 1e-10
) -> list[tuple[float, FloatArray]]:
    """
    Lowest ``count`` eigenpairs of the pencil A v = lambda W v.

    The pencil is reduced to a standard symmetric tridiagonal problem with
    W^(-1/2) A W^(-1/2). Eigenvectors are scaled to unit sup norm with their
    largest entry positive.

    Raises:
        ValueError: If count is not in [1, order]
        EigensolverError: If LAPACK fails or a residual exceeds the tolerance
    """
    if not 1 <= count <= sys.order:
        raise ValueError(f"count must be in [1, {sys.order}], got {count}")

    scale = 1.0 / np.sqrt(sys.weight)
    diag = sys.diag * scale * scale
    offdiag = sys.offdiag * scale[:-1] * scale[1:]
    try:
        values, vectors = eigh_tridiagonal(
            diag, offdiag, select="i", select_range=(0, count - 1)
        )
    except (LinAlgError, ValueError) as e:
        raise EigensolverError(f"eigensolver failure: {e}") from e

    norm_a = sys.norm_inf()
    norm_w = float(np.max(sys.weight))
    pairs: list[tuple[float, FloatArray]] = []
    for i in range(count):
        v = scale * vectors[:, i]
        peak = int(np.argmax(np.abs(v)))
        v = v / v[peak]
        lam = float(values[i])
        residual = float(np.max(np.abs(sys.matvec(v) - lam * sys.weight * v)))
        bound = residual_tol * max(norm_a, abs(lam) * norm_w)
        if residual > bound:
            raise EigensolverError(
                f"eigensolver failure: residual {residual:.3e} exceeds {bound:.3e} "
                f"for pair {i}"
            )
        pairs.append((lam, v))
    return pairs


def eig_rounding_bound(sys: TridiagonalSystem, factor: float = 10.0) -> float:
    """
    Absolute rounding error of eigenvalues from :func:`eig_sym_tridiag`.

    LAPACK resolves eigenvalues of the scaled matrix W^(-1/2) A W^(-1/2) to
    about machine epsilon times its norm, whatever their size, so small
    eigenvalues of finely graded pencils carry this floor.
    """
    scale = 1.0 / np.sqrt(sys.weight)
    scaled = TridiagonalSystem(
        diag=sys.diag * scale * scale,
        offdiag=sys.offdiag * scale[:-1] * scale[1:],
        weight=np.ones_like(sys.weight),
    )
    return factor * float(np.finfo(float).eps) * scaled.norm_inf()


def find_root(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> float:
    """
    Bracketed root of a continuous function using Brent's method.

    Args:
        f: Function with a sign change on [lo, hi]
        lo: Left end of the bracket
        hi: Right end of the bracket
        tol: Absolute bracket width at termination

    Returns:
        Root location

    Raises:
        BracketError: If f(lo) and f(hi) share a strict sign
    """
    f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    f_hi = f(hi)
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(
            f"bracket failure: f({lo:.6g})={f_lo:.3e}, f({hi:.6g})={f_hi:.3e}"
        )
    try:
        root = brentq(f, lo, hi, xtol=tol, maxiter=200)
    except RuntimeError as e:
        raise BracketError(f"bracket failure: {e}") from e
    return float(root)

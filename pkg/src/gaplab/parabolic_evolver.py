"""
Semilinear parabolic flow of the modulus of log-concavity.

psi(z, t) on [0, D/2] with psi(0, t) = 0 and psi(D/2, t) = -k solves

    psi_t = psi'' + 2 psi' psi - (n+1) tan(z) psi'
            - 2 tan(z) psi^2 - (n-1)(1 - tan^2 z) psi - 2 mu0 tan(z).

The flow is stepped in u = psi - psi~_{k,0}, which has zero boundary data:

    u_t = u'' + 2 u u' + a1 u' - 2 tan(z) u^2 + a2 u.

Diffusion is implicit (banded solve); the remaining terms are explicit.
The step size is controlled by step doubling.
"""

import logging
import math
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from scipy.linalg import solve_banded
from scipy.ndimage import gaussian_filter1d
from scipy.special import erf

from .exceptions import DomainError, IntegrationError
from .models.evolution import (
    CoefficientSet,
    ConvergenceReport,
    EvolutionState,
    Snapshot,
    Verdict,
)
from .models.modulus import ModulusProfile
from .models.numerics import FloatArray, Grid1D, SpacingKind
from .models.robin import ModelContext

logger = logging.getLogger(__name__)

MAX_REJECTIONS = 20
CONVERGED_STREAK = 50
STRICT_TIME = 0.01
# Violations are measured against 10x the step-doubling estimate plus this floor.
VIOLATION_FLOOR = 1e-12
DEFAULT_HISTORY_LIMIT = 2000


def rhs_psi(psi: FloatArray, grid: Grid1D, n: int, mu0: float) -> FloatArray:
    """
    Right-hand side of the psi-equation at interior nodes.

    Second-order central differences on a uniform grid; boundary entries are 0.
    """
    h = float(grid.spacing[0])
    z = grid.nodes[1:-1]
    tan = np.tan(z)
    p = psi[1:-1]
    d1 = (psi[2:] - psi[:-2]) / (2.0 * h)
    d2 = (psi[2:] - 2.0 * p + psi[:-2]) / (h * h)
    out = np.zeros_like(psi)
    out[1:-1] = (
        d2
        + 2.0 * d1 * p
        - (n + 1) * tan * d1
        - 2.0 * tan * p**2
        - (n - 1) * (1.0 - tan**2) * p
        - 2.0 * mu0 * tan
    )
    return out


def stationary_residual(
    psi: FloatArray, grid: Grid1D, n: int, mu0: float, c: float
) -> float:
    """Sup of psi' + psi^2 - (n-1) tan psi + mu0 - c/cos^2 at interior nodes."""
    h = float(grid.spacing[0])
    z = grid.nodes[1:-1]
    p = psi[1:-1]
    d1 = (psi[2:] - psi[:-2]) / (2.0 * h)
    residual = d1 + p**2 - (n - 1) * np.tan(z) * p + mu0 - c / np.cos(z) ** 2
    return float(np.max(np.abs(residual)))


def erf_profile(x: Any) -> Any:
    """phi(x) = 2/sqrt(pi) exp(-x^2/4) + x erf(x/2)."""
    xx = np.asarray(x, dtype=float)
    return 2.0 / math.sqrt(math.pi) * np.exp(-0.25 * xx**2) + xx * erf(0.5 * xx)


def boundary_barrier(x: Any, beta0: float, log_k1: float) -> FloatArray:
    """f(x) = log(1 + beta0 x / k1) / beta0, evaluated in log space."""
    xx = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        log_bx = np.log(beta0 * xx)
    result: FloatArray = (np.logaddexp(log_k1, log_bx) - log_k1) / beta0
    return result


def _lipschitz(values: FloatArray, h: float) -> float:
    return float(np.max(np.abs(np.diff(values)))) / h


class ParabolicEvolver:
    """
    Time stepper for the modulus flow with fixed k.

    Args:
        ctx: Model context (n, D, mu0)
        grid: Uniform grid on [0, D/2]
        tilde: Stationary modulus psi~_{k,0}
        step_rtol: Relative local error target of the step controller
        step_atol: Absolute local error target
        dt_max: Largest step the controller may take
    """

    def __init__(
        self,
        ctx: ModelContext,
        grid: Grid1D,
        tilde: ModulusProfile,
        step_rtol: float = 1e-4,
        step_atol: float = 1e-8,
        dt_max: float = 0.05,
    ) -> None:
        if grid.spacing_kind is not SpacingKind.UNIFORM:
            raise DomainError("evolution grid must be uniform")
        if abs(grid.b - ctx.half) > 1e-14 or grid.a != 0.0:
            raise DomainError(f"evolution grid must span [0, {ctx.half}]")
        self.ctx = ctx
        self.grid = grid
        self.tilde = tilde
        self.k = tilde.k
        self.step_rtol = step_rtol
        self.step_atol = step_atol
        self.dt_max = dt_max
        self.h = float(grid.spacing[0])
        self.z = grid.nodes
        self.tan = np.tan(self.z)
        self.psi_tilde = tilde(self.z)
        self.psi_tilde[0] = 0.0
        self.psi_tilde[-1] = -float(self.k)
        self.coeffs = self.coefficients()
        self.c = tilde.pieces[0].c

    def coefficients(self) -> CoefficientSet:
        """a1 = 2 psi~ - (n+1) tan, a2 = 2 psi~' - 4 tan psi~ - (n-1)(1 - tan^2)."""
        n = self.ctx.n
        psi_t = self.tilde(self.z)
        dpsi_t = self.tilde.derivative(self.z)
        a1 = 2.0 * psi_t - (n + 1) * self.tan
        a2 = 2.0 * dpsi_t - 4.0 * self.tan * psi_t - (n - 1) * (1.0 - self.tan**2)
        return CoefficientSet(z=self.z, a1=a1, a2=a2, mu0=self.ctx.mu0)

    def rhs_psi(self, psi: FloatArray) -> FloatArray:
        return rhs_psi(psi, self.grid, self.ctx.n, self.ctx.mu0)

    def explicit_terms(self, u: FloatArray) -> FloatArray:
        """2 u u' + a1 u' - 2 tan u^2 + a2 u at interior nodes."""
        interior = u[1:-1]
        d1 = (u[2:] - u[:-2]) / (2.0 * self.h)
        a1 = self.coeffs.a1[1:-1]
        a2 = self.coeffs.a2[1:-1]
        tan = self.tan[1:-1]
        result: FloatArray = (
            2.0 * interior * d1 + a1 * d1 - 2.0 * tan * interior**2 + a2 * interior
        )
        return result

    def initial_step(self, u: FloatArray) -> float:
        """0.25 h^2 / (1 + max|2u + a1| h)."""
        drift = float(np.max(np.abs(2.0 * u + self.coeffs.a1)))
        return 0.25 * self.h**2 / (1.0 + drift * self.h)

    def _imex(self, u: FloatArray, dt: float) -> FloatArray:
        size = u.size - 2
        r = dt / self.h**2
        ab = np.empty((3, size))
        ab[0, :] = -r
        ab[1, :] = 1.0 + 2.0 * r
        ab[2, :] = -r
        rhs = u[1:-1] + dt * self.explicit_terms(u)
        out = np.zeros_like(u)
        out[1:-1] = solve_banded((1, 1), ab, rhs)
        return out

    def _attempt(self, u: FloatArray, dt: float) -> tuple[FloatArray, float]:
        """Two half steps and the step-doubling error against one full step."""
        full = self._imex(u, dt)
        half = self._imex(self._imex(u, 0.5 * dt), 0.5 * dt)
        if not (np.all(np.isfinite(full)) and np.all(np.isfinite(half))):
            raise FloatingPointError("non-finite field")
        return half, float(np.max(np.abs(half - full)))

    def _safe_attempt(self, u: FloatArray, dt: float) -> tuple[FloatArray, float, float]:
        for _ in range(MAX_REJECTIONS):
            try:
                new, err = self._attempt(u, dt)
                return new, err, dt
            except (np.linalg.LinAlgError, ValueError, FloatingPointError) as e:
                logger.debug(f"step failed at dt={dt:.3e}: {e}; halving")
                dt *= 0.5
        raise IntegrationError(
            f"evolution step rejected {MAX_REJECTIONS} times (dt={dt:.3e})"
        )

    def state_from_u(self, u: FloatArray, t: float = 0.0) -> EvolutionState:
        u = np.array(u, dtype=float)
        u[0] = 0.0
        u[-1] = 0.0
        return EvolutionState(
            grid=self.grid, t=t, psi=u + self.psi_tilde, u=u, k=self.k
        )

    def state_from_profile(self, profile: ModulusProfile) -> EvolutionState:
        return self.state_from_u(profile(self.z) - self.psi_tilde)

    def step(self, state: EvolutionState, dt: float) -> EvolutionState:
        """
        One semi-implicit step of size dt (halved on solver failure).

        Boundary values of u stay exactly zero, so psi keeps (0, -k).
        """
        u, err, used = self._safe_attempt(state.u, dt)
        return EvolutionState(
            grid=self.grid,
            t=state.t + used,
            psi=u + self.psi_tilde,
            u=u,
            k=self.k,
            step_count=state.step_count + 1,
            dt_last=used,
            truncation=err,
        )

    def advance_fixed(self, u: FloatArray, dt: float, steps: int) -> FloatArray:
        """Plain IMEX steps of fixed size, for order studies."""
        for _ in range(steps):
            u = self._imex(u, dt)
        return u

    def _tolerance(self, u: FloatArray) -> float:
        return self.step_atol + self.step_rtol * float(np.max(np.abs(u)))

    def evolve(
        self,
        initial: ModulusProfile | FloatArray,
        t_end: float,
        tol: float = 1e-6,
        history_limit: int = DEFAULT_HISTORY_LIMIT,
        snapshot_times: Sequence[float] = (),
    ) -> ConvergenceReport:
        """
        Run the flow from ``initial`` until t_end or convergence.

        ``initial`` is either a modulus profile or a field of u values on the
        grid. Monotonicity in t and the sandwich 0 <= u <= u0 are checked at
        every accepted step with tolerance 10x the step-doubling estimate.
        Non-convergence is reported through ``converged``; nothing is raised.

        psi is kept at the first accepted step at or after each of
        ``snapshot_times``. Times the run never reaches take the final state.

        Raises:
            IntegrationError: If a step is rejected MAX_REJECTIONS times
        """
        if isinstance(initial, ModulusProfile):
            state = self.state_from_profile(initial)
        else:
            state = self.state_from_u(initial)
        u0 = state.u.copy()
        h = self.h

        times = [0.0]
        sup_errors = [float(np.max(np.abs(u0)))]
        max_dt: list[float] = [0.0]
        min_dt: list[float] = [0.0]
        lower = [float(np.min(u0))]
        upper = [0.0]
        mono_count = 0
        mono_worst = 0.0
        sand_count = 0
        sand_worst = 0.0
        strict_delta: float | None = None
        lip_initial = _lipschitz(state.psi, h)
        lip_max = lip_initial
        rejected = 0
        history: list[tuple[float, FloatArray]] = [(0.0, u0.copy())]
        pending = sorted({float(t) for t in snapshot_times})
        snapshots: list[Snapshot] = []
        _take_snapshots(pending, snapshots, state)

        if sup_errors[0] <= VIOLATION_FLOOR:
            logger.debug(f"k={self.k}: initial data is stationary")
            _take_snapshots(pending, snapshots, state, final=True)
            return self._report(
                state, u0, times, sup_errors, max_dt, min_dt, lower, upper,
                (0, 0.0, 0, 0.0), True, None, lip_initial, lip_max, 0, history,
                snapshots,
            )

        dt = self.initial_step(u0)
        streak = 0
        converged = False
        consecutive = 0
        while state.t < t_end and not converged:
            dt = min(dt, t_end - state.t, self.dt_max)
            u, err, dt = self._safe_attempt(state.u, dt)
            target = self._tolerance(state.u)
            if err > target:
                rejected += 1
                consecutive += 1
                if consecutive > MAX_REJECTIONS:
                    raise IntegrationError(
                        f"evolution step rejected {MAX_REJECTIONS} times "
                        f"at t={state.t:.6g}"
                    )
                dt *= max(0.2, 0.9 * math.sqrt(target / err))
                continue
            consecutive = 0

            slack = 10.0 * err + VIOLATION_FLOOR
            change = u[1:-1] - state.u[1:-1]
            excess = float(np.max(change))
            if excess > slack:
                mono_count += 1
                mono_worst = max(mono_worst, excess)
            below = float(np.min(u[1:-1]))
            above = float(np.max(u[1:-1] - u0[1:-1]))
            if below < -slack or above > slack:
                sand_count += 1
                sand_worst = max(sand_worst, -below, above)

            state = EvolutionState(
                grid=self.grid,
                t=state.t + dt,
                psi=u + self.psi_tilde,
                u=u,
                k=self.k,
                step_count=state.step_count + 1,
                dt_last=dt,
                truncation=err,
            )
            rate = change / dt
            times.append(state.t)
            sup = float(np.max(np.abs(u)))
            sup_errors.append(sup)
            max_dt.append(float(np.max(rate)))
            min_dt.append(float(np.min(rate)))
            lower.append(below)
            upper.append(-above)
            lip_max = max(lip_max, _lipschitz(state.psi, h))
            if strict_delta is None and state.t >= STRICT_TIME:
                strict_delta = -float(np.max(rate))
            if len(history) < history_limit:
                history.append((state.t, u.copy()))
            _take_snapshots(pending, snapshots, state)

            streak = streak + 1 if sup < tol else 0
            converged = streak >= CONVERGED_STREAK
            dt = dt * min(2.0, 0.9 * math.sqrt(target / err)) if err > 0 else 2.0 * dt

        _take_snapshots(pending, snapshots, state, final=True)
        if not converged:
            logger.warning(
                f"k={self.k}: no convergence by t={state.t:.4g}, "
                f"sup error {sup_errors[-1]:.3e}"
            )
        if mono_count or sand_count:
            logger.warning(
                f"k={self.k}: {mono_count} monotonicity and {sand_count} "
                f"sandwich violations"
            )
        logger.debug(
            f"k={self.k}: {state.step_count} steps to t={state.t:.4g}, "
            f"{rejected} rejected"
        )
        return self._report(
            state, u0, times, sup_errors, max_dt, min_dt, lower, upper,
            (mono_count, mono_worst, sand_count, sand_worst), converged,
            strict_delta, lip_initial, lip_max, rejected, history, snapshots,
        )

    def _report(
        self,
        state: EvolutionState,
        u0: FloatArray,
        times: list[float],
        sup_errors: list[float],
        max_dt: list[float],
        min_dt: list[float],
        lower: list[float],
        upper: list[float],
        violations: tuple[int, float, int, float],
        converged: bool,
        strict_delta: float | None,
        lip_initial: float,
        lip_max: float,
        rejected: int,
        history: list[tuple[float, FloatArray]],
        snapshots: list[Snapshot],
    ) -> ConvergenceReport:
        mono_count, mono_worst, sand_count, sand_worst = violations
        return ConvergenceReport(
            k=self.k,
            times=times,
            sup_errors=sup_errors,
            max_time_derivative=max_dt,
            min_time_derivative=min_dt,
            sandwich_lower=lower,
            sandwich_upper=upper,
            monotonicity_violations=mono_count,
            monotonicity_worst=mono_worst,
            sandwich_violations=sand_count,
            sandwich_worst=sand_worst,
            stationary_residual_final=stationary_residual(
                state.psi, self.grid, self.ctx.n, self.ctx.mu0, self.c
            ),
            converged=converged,
            decay_rate=decay_rate(times, sup_errors),
            strict_delta=strict_delta,
            lipschitz_initial=lip_initial,
            lipschitz_max=lip_max,
            rejected_steps=rejected,
            final_state=state,
            u_initial=u0,
            history=history,
            snapshots=snapshots,
        )

    def comparison_test(
        self,
        u_init: FloatArray,
        v_init: FloatArray,
        t_end: float,
    ) -> Verdict:
        """
        Co-evolve u and v with shared steps and check u <= v throughout.

        Both fields are advanced by the same scheme, so the ordering of the
        initial data must persist up to 10x the truncation estimate.
        """
        u = self.state_from_u(u_init).u
        v = self.state_from_u(v_init).u
        t = 0.0
        dt = min(self.initial_step(u), self.initial_step(v))
        worst = float(np.min(v - u))
        where: tuple[float, float] | None = None
        checked = 0
        consecutive = 0
        while t < t_end:
            dt = min(dt, t_end - t, self.dt_max)
            u_new, err_u, used = self._safe_attempt(u, dt)
            v_new, err_v, _ = self._safe_attempt(v, used)
            err = max(err_u, err_v)
            target = min(self._tolerance(u), self._tolerance(v))
            if err > target:
                consecutive += 1
                if consecutive > MAX_REJECTIONS:
                    raise IntegrationError(
                        f"comparison step rejected {MAX_REJECTIONS} times at t={t:.6g}"
                    )
                dt = used * max(0.2, 0.9 * math.sqrt(target / err))
                continue
            consecutive = 0
            u, v, t = u_new, v_new, t + used
            checked += 1
            gap = v - u + 10.0 * err + VIOLATION_FLOOR
            i = int(np.argmin(gap))
            margin = float(gap[i])
            if margin < worst:
                worst = margin
                where = (float(self.z[i]), t)
            dt = used * min(2.0, 0.9 * math.sqrt(target / err)) if err > 0 else 2.0 * used

        passed = worst >= 0.0
        message = "ordering preserved" if passed else "ordering violated"
        if not passed:
            logger.warning(f"comparison: {message}, margin {worst:.3e} at {where}")
        return Verdict(
            name="comparison",
            passed=passed,
            worst_margin=worst,
            checked=checked,
            location=where,
            message=message,
        )


def _take_snapshots(
    pending: list[float],
    taken: list[Snapshot],
    state: EvolutionState,
    final: bool = False,
) -> None:
    while pending and (final or state.t >= pending[0]):
        requested = pending.pop(0)
        taken.append(Snapshot(requested=requested, t=state.t, psi=state.psi.copy()))


def decay_rate(times: list[float], sup_errors: list[float]) -> float | None:
    """Exponential rate fitted to the second half of the sup-error series."""
    t = np.asarray(times)
    e = np.asarray(sup_errors)
    keep = e > 1e-13
    t, e = t[keep], e[keep]
    if t.size < 4:
        return None
    start = t.size // 2
    t, e = t[start:], e[start:]
    if t[-1] - t[0] <= 0:
        return None
    slope = np.polyfit(t, np.log(e), 1)[0]
    return float(-slope)


def erf_barrier_check(
    evolver: ParabolicEvolver,
    run: ConvergenceReport,
    z0: float,
    tau: float,
) -> Verdict:
    """
    Check the interior Lipschitz barriers w and w- around z0.

        w(z, t) = u0(z0) + tau + mu_tau t + 2 L0 sqrt(t) phi(|z - z0|/sqrt(t))

    on 0 < t <= 1/mu_tau, and the t -> 0 limit against u0. A violation is a
    scheme-accuracy warning.
    """
    ctx = evolver.ctx
    z = evolver.z
    u0 = run.u_initial
    L0 = _lipschitz(u0, evolver.h)
    A0 = float(erf_profile(max(z0, ctx.half - z0)))
    A1, A2 = evolver.coeffs.bounds
    C1 = float(np.max(np.abs(u0)))
    mu_tau = 1.01 * (2 * L0 * A1 + (A2 + 4 * L0) * (C1 + tau + 1 + 2 * L0 * A0)) + 1e-12
    t_max = 1.0 / mu_tau
    anchor = float(np.interp(z0, z, u0))
    dist = np.abs(z - z0)

    worst = float(np.min(anchor + tau + 2 * L0 * dist - u0))
    worst = min(worst, float(np.min(u0 - (anchor - tau - 2 * L0 * dist))))
    where: tuple[float, float] | None = None
    checked = 0
    for t, u in run.history:
        if t <= 0.0 or t > t_max:
            continue
        checked += 1
        root = math.sqrt(t)
        spread = mu_tau * t + 2 * L0 * root * erf_profile(dist / root)
        upper = anchor + tau + spread - u
        lower = u - (anchor - tau - spread)
        margin = np.minimum(upper, lower)
        i = int(np.argmin(margin))
        if margin[i] < worst:
            worst = float(margin[i])
            where = (float(z[i]), t)

    passed = worst >= 0.0
    if not passed:
        logger.warning(f"erf barrier violated by {-worst:.3e} at {where}")
    return Verdict(
        name="erf-barrier",
        passed=passed,
        worst_margin=worst,
        checked=checked,
        location=where,
        message="inside barrier" if passed else "scheme-accuracy warning",
        constants={
            "L0": L0, "A0": A0, "A1": A1, "A2": A2, "C1": C1,
            "muTau": mu_tau, "tMax": t_max, "tau": tau, "z0": z0,
        },
    )


def boundary_barrier_check(
    evolver: ParabolicEvolver,
    run: ConvergenceReport,
    initial: ModulusProfile,
    steps: int = 100,
) -> Verdict:
    """
    Check u0 - f <= u <= u0 + f near both ends over the first ``steps`` steps.

    f(x) = log(1 + beta0 x / k1) / beta0 on [0, sigma] with the constants
    M, beta0, k1 and sigma of the boundary gradient estimate.
    """
    ctx = evolver.ctx
    z = evolver.z
    u0 = run.u_initial
    snapshots = run.history[: steps + 1]
    M = max(float(np.max(np.abs(u - u0))) for _, u in snapshots)
    C1 = float(np.max(np.abs(u0)))
    A1, A2 = evolver.coeffs.bounds
    alpha1 = 2 * C1 + A1
    alpha2 = 2 * C1**2 * math.tan(ctx.half) + C1 * A2
    du0 = initial.derivative(z) - evolver.tilde.derivative(z)
    ddu0 = initial.second_derivative(z) - evolver.tilde.second_derivative(z)
    beta0 = 4 * max(alpha1, alpha2) + float(np.max(np.abs(ddu0)))
    base = min(0.25, 1.0 / (2.0 * max(float(np.max(np.abs(du0))), 1e-300)))
    log_k1 = -M * beta0 + math.log(base)
    sigma = min(base * (-math.expm1(-M * beta0)) / beta0, ctx.half)

    worst = math.inf
    where: tuple[float, float] | None = None
    checked = 0
    for side in (z, ctx.half - z):
        near = side <= sigma
        f = boundary_barrier(side[near], beta0, log_k1)
        for t, u in snapshots:
            checked += 1
            diff = u[near] - u0[near]
            margin = f - np.abs(diff)
            if margin.size == 0:
                continue
            i = int(np.argmin(margin))
            if margin[i] < worst:
                worst = float(margin[i])
                where = (float(z[near][i]), t)
    if not math.isfinite(worst):
        worst = 0.0

    passed = worst >= -VIOLATION_FLOOR
    if not passed:
        logger.warning(f"boundary barrier violated by {-worst:.3e} at {where}")
    return Verdict(
        name="boundary-barrier",
        passed=passed,
        worst_margin=worst,
        checked=checked,
        location=where,
        message="inside barrier" if passed else "scheme-accuracy warning",
        constants={"M": M, "beta0": beta0, "logK1": log_k1, "sigma": sigma},
    )


def _smoothstep(s: FloatArray) -> FloatArray:
    s = np.clip(s, 0.0, 1.0)
    result: FloatArray = s * s * (3.0 - 2.0 * s)
    return result


def mollify_initial(
    evolver: ParabolicEvolver, initial: ModulusProfile, eps: float
) -> FloatArray:
    """
    Smoothed data u0^eps with 0 <= u0^eps <= u0 and sup|u0^eps - u0| <= eps.

    Gaussian smoothing is shifted below u0 and blended in away from the ends,
    so u0^eps equals u0 on [0, kappa] and [D/2 - kappa, D/2].

    Raises:
        DomainError: If eps is not positive
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    z = evolver.z
    h = evolver.h
    half = evolver.ctx.half
    u0 = evolver.state_from_profile(initial).u
    lip0 = _lipschitz(u0, h)

    width = eps
    smooth = gaussian_filter1d(u0, sigma=width / h, mode="nearest")
    while float(np.max(np.abs(smooth - u0))) > 0.5 * eps and width > h:
        width *= 0.5
        smooth = gaussian_filter1d(u0, sigma=width / h, mode="nearest")
    shifted = smooth - max(float(np.max(smooth - u0)), 0.0)

    if initial.kinks:
        nearest = min(min(zk, half - zk) for zk in initial.kinks)
        kappa = nearest / 3.0
    else:
        kappa = half / 8.0
    chi = _smoothstep((z - kappa) / kappa) * _smoothstep((half - kappa - z) / kappa)

    mollified = u0 + chi * (shifted - u0)
    if np.any(mollified < 0):
        logger.debug("clipping mollified data at zero")
        mollified = np.maximum(mollified, 0.0)
    mollified[0] = mollified[-1] = 0.0
    lip = _lipschitz(mollified, h)
    if lip > 2.0 * lip0:
        logger.warning(f"mollified Lipschitz {lip:.3e} exceeds 2 L0 = {2 * lip0:.3e}")
    return mollified


def evolve_mollified(
    evolver: ParabolicEvolver,
    initial: ModulusProfile,
    eps: float,
    t_end: float,
    tol: float = 1e-6,
) -> ConvergenceReport:
    """Secondary run of the flow from mollified initial data."""
    return evolver.evolve(mollify_initial(evolver, initial, eps), t_end, tol)


def evolution_grid(ctx: ModelContext, nodes: int) -> Grid1D:
    return Grid1D.build(0.0, ctx.half, nodes, SpacingKind.UNIFORM)


def temporal_order(
    evolver: ParabolicEvolver,
    u_init: FloatArray,
    t_end: float,
    steps: int,
) -> float:
    """Observed order from runs with steps, 2 steps and 4 steps."""
    runs: list[FloatArray] = [
        evolver.advance_fixed(u_init.copy(), t_end / (steps * f), steps * f)
        for f in (1, 2, 4)
    ]
    e1 = float(np.max(np.abs(runs[0] - runs[1])))
    e2 = float(np.max(np.abs(runs[1] - runs[2])))
    return math.log2(e1 / e2)


def spatial_order(
    field: Callable[[FloatArray], FloatArray],
    exact: Callable[[FloatArray], FloatArray],
    ctx: ModelContext,
    nodes: int,
) -> float:
    """Observed order of rhs_psi against an exact right-hand side on two grids."""
    errors = []
    for count in (nodes, 2 * nodes - 1):
        grid = evolution_grid(ctx, count)
        values = rhs_psi(field(grid.nodes), grid, ctx.n, ctx.mu0)
        errors.append(
            float(np.max(np.abs(values[1:-1] - exact(grid.nodes)[1:-1])))
        )
    return math.log2(errors[0] / errors[1])

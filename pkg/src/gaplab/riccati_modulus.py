"""
Riccati branches and the initial modulus of log-concavity.

Branches solve psi' + psi^2 - (n-1) tan(z) psi + mu0 = c / cos^2(z):

* side L starts at psi(0) = 0 and runs forward;
* side R starts at psi(D/2) = -k and runs backward in the chart
  p = psi - (n-1)/2 tan z, where p' + p^2 = V and

      V(z) = ((n-1)(n-3) + 4c) / (4 cos^2 z) - (n-1)^2/4 - mu0.

Side R may blow up to +inf at some z0 in (0, D/2); it is +inf below z0.
The supersolution psi+_{k,s} is min(psi^L_{c(1/k)+s}, psi^R_{k,c(1/k)-s}) and
the initial modulus psi_{k,0} is the minimum of psi+_{j,s(j)} over j <= k.
"""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np

from .exceptions import BoundViolationError, DomainError, SearchCapError
from .models.modulus import (
    Envelope,
    EnvelopeSet,
    ModulusProfile,
    PSubstitution,
    RiccatiCurve,
    ShiftSearch,
    Side,
    SupersolutionProfile,
)
from .models.numerics import FloatArray, Grid1D
from .models.robin import ModelContext
from .numerics_core import find_root, integrate_ivp
from .prufer_robin import solve_c_of_eps, tilde_psi_k0

logger = logging.getLogger(__name__)

KINK_GRID_NODES = 2001
# Difference clip so root finding never sees inf - inf.
DIFF_CLIP = 1e12
ENVELOPE_CEILING = 1e7

ShiftOracle = Callable[[float], bool]


def potential(z: Any, c: float, ctx: ModelContext) -> Any:
    """V(z) of the p-chart for shift c."""
    n = ctx.n
    return ((n - 1) * (n - 3) + 4.0 * c) / (4.0 * np.cos(z) ** 2) - (
        (n - 1) ** 2
    ) / 4.0 - ctx.mu0


def potential_extrema(c: float, ctx: ModelContext) -> tuple[float, float]:
    """
    (inf V, sup V) over [0, D/2].

    V is monotone in z: increasing when (n-1)(n-3) + 4c >= 0 (inf at 0,
    equal to c - (n-1)/2 - mu0), decreasing otherwise.
    """
    at_left = float(potential(0.0, c, ctx))
    at_right = float(potential(ctx.half, c, ctx))
    if (ctx.n - 1) * (ctx.n - 3) + 4.0 * c >= 0:
        return at_left, at_right
    return at_right, at_left


def k_tilde(k: float, ctx: ModelContext) -> float:
    """k~ = k + (n-1)/2 tan(D/2)."""
    return k + ctx.m * math.tan(ctx.half)


def solve_branch_L(c: float, ctx: ModelContext, grid: Grid1D) -> RiccatiCurve:
    """
    Forward branch with psi(0) = 0.

    Raises:
        BoundViolationError: If the branch blows up (excluded by the tanh
            upper bound, so this signals a solver problem)
    """
    n1, mu0 = ctx.n - 1, ctx.mu0

    def rhs(z: float, y: FloatArray) -> list[float]:
        psi = y[0]
        return [c / math.cos(z) ** 2 - psi * psi + n1 * math.tan(z) * psi - mu0]

    traj = integrate_ivp(rhs, 0.0, ctx.half, [0.0], ctx.integrator)
    if traj.blowup is not None:
        raise BoundViolationError(
            f"bound violation: side L branch blew up for c={c}",
            location=traj.blowup.location,
        )

    def evaluator(z: Any) -> FloatArray:
        return np.asarray(traj(z)[0], dtype=float)

    samples = evaluator(grid.nodes)
    samples[0] = 0.0
    return RiccatiCurve(
        side=Side.L,
        c=c,
        n=ctx.n,
        mu0=ctx.mu0,
        z=grid.nodes,
        samples=samples,
        evaluator=evaluator,
    )


def solve_branch_R(
    k: int, c: float, ctx: ModelContext, grid: Grid1D
) -> RiccatiCurve:
    """
    Backward branch with psi(D/2) = -k, integrated in the p-chart.

    A blow-up location is recorded when the branch reaches the blow-up
    threshold before z = 0.
    """
    m = ctx.m
    n, mu0 = ctx.n, ctx.mu0
    numerator = ((n - 1) * (n - 3) + 4.0 * c) / 4.0
    constant = (n - 1) ** 2 / 4.0 + mu0

    def rhs(z: float, y: FloatArray) -> list[float]:
        p = y[0]
        return [numerator / math.cos(z) ** 2 - constant - p * p]

    traj = integrate_ivp(rhs, ctx.half, 0.0, [-k_tilde(k, ctx)], ctx.integrator)
    blowup_z = None
    if traj.blowup is not None:
        blowup_z = traj.blowup.location
        logger.debug(f"psi^R_{{{k},{c:.6g}}} blows up at z={blowup_z:.10g}")

    def evaluator(z: Any) -> FloatArray:
        zz = np.asarray(z, dtype=float)
        return np.asarray(traj(zz)[0] + m * np.tan(zz), dtype=float)

    nodes = grid.nodes if blowup_z is None else grid.nodes[grid.nodes > blowup_z]
    samples = evaluator(nodes)
    samples[-1] = -float(k)
    return RiccatiCurve(
        side=Side.R,
        c=c,
        n=ctx.n,
        mu0=ctx.mu0,
        z=nodes,
        samples=samples,
        evaluator=evaluator,
        k=k,
        blowup_z=blowup_z,
    )


def p_substitute(
    curve: RiccatiCurve, ctx: ModelContext, method: str = "analytic"
) -> PSubstitution:
    """
    p = psi - (n-1)/2 tan z and V on the curve's sample points.

    The residual of p' + p^2 = V uses the branch slope (``analytic``) or a
    second-order difference of the p samples (``finite-difference``).
    The residual is relative to max(1, p^2) over the finite samples.
    """
    z = curve.z
    p = curve.samples - ctx.m * np.tan(z)
    v = potential(z, curve.c, ctx)
    if method == "analytic":
        dp = curve.slope(z) - ctx.m / np.cos(z) ** 2
    elif method == "finite-difference":
        dp = np.gradient(p, z, edge_order=2)
    else:
        raise ValueError(f"Unknown residual method: {method}")
    scaled = np.abs(dp + p * p - v) / np.maximum(1.0, p * p)
    v_inf, v_sup = potential_extrema(curve.c, ctx)
    return PSubstitution(
        z=z,
        p_samples=p,
        v_samples=v,
        k_tilde=k_tilde(curve.k or 0, ctx),
        v_inf=v_inf,
        v_sup=v_sup,
        residual=float(np.max(scaled[np.isfinite(scaled)], initial=0.0)),
    )


def _tanh_envelope(name: str, lam: float, grid: Grid1D, m: float) -> Envelope:
    z = grid.nodes
    values = lam * np.tanh(lam * z) + m * np.tan(z)
    return Envelope(
        name=name,
        z=z,
        values=values,
        valid_from=float(z[0]),
        valid_to=float(z[-1]),
        parameter=lam,
    )


def _tan_envelope(
    name: str, lam: float, kt: float, grid: Grid1D, half: float, m: float
) -> Envelope:
    z = grid.nodes
    x = half - z
    if lam > 0:
        theta = math.atan(kt / lam)
        valid_from = max(0.0, half - (0.5 * math.pi + theta) / lam)
        mask = z > valid_from
        p = lam * np.tan(lam * x[mask] - theta)
    else:
        valid_from = 0.0
        mask = np.ones(z.shape, dtype=bool)
        p = -kt / (1.0 + kt * x)
    values = p + m * np.tan(z[mask])
    keep = np.abs(values) < ENVELOPE_CEILING
    return Envelope(
        name=name,
        z=z[mask][keep],
        values=values[keep],
        valid_from=valid_from,
        valid_to=half,
        parameter=lam,
    )


def explicit_bounds(
    k: int, c: float, s: float, ctx: ModelContext, grid: Grid1D
) -> EnvelopeSet:
    """
    Closed-form envelopes for psi^L_{c+s} and psi^R_{k,c-s}.

    Upper envelopes use lambda_+ = sqrt(max(sup V_{c+s}, 0)) and
    lambda_- = sqrt(max(-inf V_{c-s}, 0)). Lower envelopes use
    lambda~_+ = sqrt(s + inf V_c) and lambda~_- = sqrt(s - sup V_c).
    The side-R formulas hold for z > D/2 - (pi/2 + arctan(k~/lambda))/lambda.

    Raises:
        DomainError: If s <= max(-inf V_c, sup V_c) ("s too small for
            lambda~ bounds")
    """
    m, half = ctx.m, ctx.half
    kt = k_tilde(k, ctx)
    v_inf, v_sup = potential_extrema(c, ctx)
    threshold = max(-v_inf, v_sup)
    if not s > threshold:
        raise DomainError(
            f"s too small for lambda~ bounds: s={s} <= {threshold:.6g}"
        )

    lam_plus = math.sqrt(max(potential_extrema(c + s, ctx)[1], 0.0))
    lam_minus = math.sqrt(max(-potential_extrema(c - s, ctx)[0], 0.0))
    lower_plus = math.sqrt(s + v_inf)
    lower_minus = math.sqrt(s - v_sup)
    return EnvelopeSet(
        upper_left=_tanh_envelope("upper_left", lam_plus, grid, m),
        upper_right=_tan_envelope("upper_right", lam_minus, kt, grid, half, m),
        lower_left=_tanh_envelope("lower_left", lower_plus, grid, m),
        lower_right=_tan_envelope("lower_right", lower_minus, kt, grid, half, m),
    )


def envelope_margins(
    left: RiccatiCurve, right: RiccatiCurve, envelopes: EnvelopeSet
) -> dict[str, float]:
    """
    Smallest scaled margin of each branch against its envelopes.

    Margins are divided by max(1, |envelope|) because the tan envelopes are
    singular at the end of their validity range. Non-negative means contained.
    """

    def margin(curve: RiccatiCurve, env: Envelope, upper: bool) -> float:
        if env.z.size == 0:
            return math.inf
        values = curve(env.z)
        gap = env.values - values if upper else values - env.values
        scaled = gap / np.maximum(1.0, np.abs(env.values))
        finite = scaled[np.isfinite(scaled)]
        return float(np.min(finite)) if finite.size else math.inf

    return {
        "upperLeft": margin(left, envelopes.upper_left, True),
        "upperRight": margin(right, envelopes.upper_right, True),
        "lowerLeft": margin(left, envelopes.lower_left, False),
        "lowerRight": margin(right, envelopes.lower_right, False),
    }


def _crossing(
    left: RiccatiCurve, right: RiccatiCurve, z: FloatArray
) -> float | None:
    def diff(x: float) -> float:
        value = float(left(x)[0] - right(x)[0])
        return float(np.clip(value, -DIFF_CLIP, DIFF_CLIP))

    values = np.clip(left(z) - right(z), -DIFF_CLIP, DIFF_CLIP)
    changes = np.nonzero((values[:-1] < 0) & (values[1:] >= 0))[0]
    if changes.size == 0:
        return None
    i = int(changes[0])
    return find_root(diff, float(z[i]), float(z[i + 1]), tol=1e-13)


def supersolution(
    k: int,
    s: float,
    ctx: ModelContext,
    grid: Grid1D,
    c: float | None = None,
) -> SupersolutionProfile:
    """
    psi+_{k,s} = min(psi^L_{c(1/k)+s}, psi^R_{k,c(1/k)-s}).

    Raises:
        DomainError: If s < 0
    """
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    if c is None:
        c = solve_c_of_eps(1.0 / k, ctx)

    left = solve_branch_L(c + s, ctx, grid)
    right = solve_branch_R(k, c - s, ctx, grid)
    samples = np.minimum(left(grid.nodes), right(grid.nodes))
    samples[0] = 0.0
    samples[-1] = -float(k)
    crossing = _crossing(left, right, grid.nodes) if s > 0 else None
    return SupersolutionProfile(
        k=k,
        s=s,
        z=grid.nodes,
        samples=samples,
        crossing_z=crossing,
        left=left,
        right=right,
    )


def find_s_of_k(
    k: int, oracle: ShiftOracle, s_max: float, tol: float = 1e-3
) -> ShiftSearch:
    """
    Smallest s (to within tol) for which the oracle accepts psi+_{k,s}.

    Pass/fail is assumed monotone in s; three spot checks above the result
    test that assumption and failures are logged.

    Raises:
        SearchCapError: If the oracle rejects s_max
    """
    evaluations = 1
    if oracle(0.0):
        s = 0.0
    else:
        evaluations += 1
        if not oracle(s_max):
            raise SearchCapError(
                f"s cap exceeded; modulus premise unverified at this resolution "
                f"(k={k}, s_max={s_max})"
            )
        lo, hi = 0.0, s_max
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            evaluations += 1
            if oracle(mid):
                hi = mid
            else:
                lo = mid
        s = hi

    spot_checks = []
    for fraction in (0.25, 0.5, 0.75):
        trial = s + fraction * (s_max - s)
        evaluations += 1
        spot_checks.append((trial, bool(oracle(trial))))
    result = ShiftSearch(k=k, s=s, evaluations=evaluations, spot_checks=spot_checks)
    if not result.monotone:
        logger.warning(f"s({k}) search: pass/fail not monotone, checks {spot_checks}")
    logger.debug(f"s({k}) = {s:.6g} after {evaluations} oracle calls")
    return result


def _kinks(
    pieces: Sequence[RiccatiCurve], z: FloatArray, edge: float
) -> tuple[list[float], list[float]]:
    stack = np.vstack([piece(z) for piece in pieces])
    active = np.argmin(stack, axis=0)
    kinks: list[float] = []
    jumps: list[float] = []
    for i in np.nonzero(active[1:] != active[:-1])[0]:
        a, b = pieces[int(active[i])], pieces[int(active[i + 1])]

        def diff(x: float, a: RiccatiCurve = a, b: RiccatiCurve = b) -> float:
            value = float(a(x)[0] - b(x)[0])
            return float(np.clip(value, -DIFF_CLIP, DIFF_CLIP))

        lo, hi = float(z[i]), float(z[i + 1])
        if np.sign(diff(lo)) == np.sign(diff(hi)):
            continue
        zk = find_root(diff, lo, hi, tol=1e-13)
        if zk <= edge or zk >= z[-1] - edge:
            continue
        kinks.append(zk)
        jumps.append(float(b.slope(zk)[0] - a.slope(zk)[0]))
    return kinks, jumps


def assemble_modulus(
    k: int, pieces: Sequence[RiccatiCurve], grid: Grid1D, fine: Grid1D
) -> ModulusProfile:
    """Pointwise minimum of branches with kinks located on the fine grid."""
    kinks, jumps = _kinks(pieces, fine.nodes, edge=1e-12)
    fine_values = np.min(np.vstack([piece(fine.nodes) for piece in pieces]), axis=0)
    lipschitz = float(np.max(np.abs(np.diff(fine_values) / fine.spacing)))
    samples = np.min(np.vstack([piece(grid.nodes) for piece in pieces]), axis=0)
    samples[0] = 0.0
    samples[-1] = -float(k)
    for zk, jump in zip(kinks, jumps, strict=True):
        logger.debug(f"psi_{{{k},0}} kink at z={zk:.10g}, jump {jump:.3e}")
    return ModulusProfile(
        k=k,
        z=grid.nodes,
        samples=samples,
        kinks=kinks,
        kink_jumps=jumps,
        lipschitz_const=lipschitz,
        pieces=list(pieces),
    )


def initial_modulus(
    k: int,
    ctx: ModelContext,
    grid: Grid1D,
    shifts: Mapping[int, float],
    c_values: Mapping[int, float] | None = None,
    workers: int = 1,
) -> ModulusProfile:
    """
    psi_{k,0} = min over 1 <= j <= k of psi+_{j,s(j)}.

    Args:
        k: Boundary slope index
        ctx: Model context
        grid: Output grid
        shifts: s(j) for every j <= k
        c_values: Optional precomputed c(1/j)
        workers: Thread count for the independent branch solves

    Raises:
        DomainError: If a shift is missing
    """
    missing = [j for j in range(1, k + 1) if j not in shifts]
    if missing:
        raise DomainError(f"s(j) missing for j={missing}")
    c_values = dict(c_values or {})

    def solve(j: int) -> list[RiccatiCurve]:
        c = c_values.get(j)
        if c is None:
            c = solve_c_of_eps(1.0 / j, ctx)
        s = shifts[j]
        if s == 0:
            return [solve_branch_L(c, ctx, grid)]
        return [solve_branch_L(c + s, ctx, grid), solve_branch_R(j, c - s, ctx, grid)]

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        solved = list(pool.map(solve, range(1, k + 1)))
    pieces = [piece for group in solved for piece in group]
    fine = Grid1D.build(
        0.0, ctx.half, max(KINK_GRID_NODES, grid.size), grid.spacing_kind
    )
    return assemble_modulus(k, pieces, grid, fine)


def dichotomy_check(
    profile: ModulusProfile, tilde: ModulusProfile, tol: float = 1e-9
) -> tuple[str, float, float]:
    """
    Classify psi_{k,0} - psi~_{k,0} on the interior samples.

    Returns:
        ("identical" | "strict" | "violated", min difference, sup difference)
    """
    diff = profile.samples[1:-1] - tilde(profile.z[1:-1])
    low, high = float(np.min(diff)), float(np.max(np.abs(diff)))
    if high <= tol:
        return "identical", low, high
    if low > 0:
        return "strict", low, high
    return "violated", low, high


class ModulusFamily:
    """
    psi_{k,0} for increasing k with shared c(1/j) and s(j).

    Reusing s(j) across k makes psi_{k,0} non-increasing in k. Each s(j) is
    the larger of the oracle's value and ``s_floor``.
    """

    def __init__(
        self,
        ctx: ModelContext,
        grid: Grid1D,
        oracle_factory: Callable[[int, float], ShiftOracle] | None = None,
        s_max: float = 50.0,
        s_floor: float = 0.0,
        workers: int = 1,
    ) -> None:
        if s_floor < 0:
            raise DomainError(f"s_floor must be >= 0, got {s_floor}")
        self.ctx = ctx
        self.grid = grid
        self.oracle_factory = oracle_factory
        self.s_max = s_max
        self.s_floor = s_floor
        self.workers = workers
        self.c_values: dict[int, float] = {}
        self.searches: dict[int, ShiftSearch] = {}
        self.shifts: dict[int, float] = {}

    def c_of(self, j: int) -> float:
        if j not in self.c_values:
            self.c_values[j] = solve_c_of_eps(1.0 / j, self.ctx)
        return self.c_values[j]

    def shift_of(self, j: int) -> float:
        if j not in self.shifts:
            s = 0.0
            if self.oracle_factory is not None:
                search = find_s_of_k(
                    j, self.oracle_factory(j, self.c_of(j)), self.s_max
                )
                self.searches[j] = search
                s = search.s
            self.shifts[j] = max(s, self.s_floor)
        return self.shifts[j]

    def stationary(self, k: int) -> ModulusProfile:
        return tilde_psi_k0(k, self.ctx, self.grid, c=self.c_of(k))

    def initial(self, k: int) -> ModulusProfile:
        for j in range(1, k + 1):
            self.c_of(j)
            self.shift_of(j)
        return initial_modulus(
            k,
            self.ctx,
            self.grid,
            self.shifts,
            c_values=self.c_values,
            workers=self.workers,
        )

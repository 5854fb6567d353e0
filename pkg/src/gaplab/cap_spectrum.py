"""
Dirichlet eigenvalues of geodesic balls in S^n and the two-point inequality.

Separation of variables reduces the Laplacian on a ball of radius R to

    phi'' + (n-1) cot(r) phi' + [lambda - l(l+n-2)/sin^2 r] phi = 0

on [0, R] with phi(R) = 0 and regularity at the center. lambda_0 is the
l = 0 fundamental and lambda_1 the l = 1 fundamental; the second l = 0 mode
is checked to lie above it.

Points live in R^(n+1) with the ball centered at the last unit vector;
geodesics are great circles through the pair.
"""

import logging
import math
from collections.abc import Callable
from typing import Any

import numpy as np

from .exceptions import BracketError, DomainError, IntegrationError
from .models.cap import CapProblem, GapChainReport, RadialEigen, TwoPointSample
from .models.evolution import Verdict
from .models.modulus import SupersolutionProfile
from .models.numerics import (
    FloatArray,
    Grid1D,
    IntegratorConfig,
    Trajectory,
    TridiagonalSystem,
)
from .models.robin import ModelContext
from .models.spectrum import EigenPair, ModelGap, check_diameter
from .numerics_core import eig_sym_tridiag, find_root, integrate_ivp
from .riccati_modulus import ShiftOracle, supersolution

logger = logging.getLogger(__name__)

RADIAL_INTEGRATOR = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
START_OFFSETS = (1e-6, 1e-7)
BRACKET_WIDTH = 0.05
MAX_WIDENINGS = 3
QUADRATURE_POINTS = 4
DEFAULT_SEED = 42
DEFAULT_RADIUS_FRACTION = 0.98
OUTPUT_NODES = 401

ModulusChecker = Callable[[Callable[[Any], FloatArray]], bool]


def angular_eigenvalue(n: int, l: int) -> int:
    """l(l+n-2), the eigenvalue of the l-th spherical harmonic on S^(n-1)."""
    return l * (l + n - 2)


def radial_system(
    prob: CapProblem, l: int, nodes: int
) -> tuple[FloatArray, TridiagonalSystem]:
    """
    Finite-volume pencil for (sin^(n-1) phi')' - L sin^(n-3) phi = -lambda sin^(n-1) phi.

    Cell integrals use Gauss-Legendre quadrature. For l = 0 the center node is
    an unknown with a half cell and no inner flux; for l >= 1 it carries the
    Dirichlet value 0.

    Returns:
        Unknown node locations and the pencil
    """
    n = prob.n
    r = np.linspace(0.0, prob.R, nodes)
    h = r[1] - r[0]
    mid = 0.5 * (r[:-1] + r[1:])
    flux = np.sin(mid) ** (n - 1) / h

    first = 0 if l == 0 else 1
    unknown = np.arange(first, nodes - 1)
    left = np.maximum(r[unknown] - 0.5 * h, 0.0)
    right = r[unknown] + 0.5 * h
    xg, wg = np.polynomial.legendre.leggauss(QUADRATURE_POINTS)
    centre = 0.5 * (left + right)
    width = 0.5 * (right - left)
    pts = centre[:, None] + width[:, None] * xg[None, :]

    def cell_integral(values: FloatArray) -> FloatArray:
        result: FloatArray = width * (values @ wg)
        return result

    weight = cell_integral(np.sin(pts) ** (n - 1))
    coupling = float(angular_eigenvalue(n, l))
    potential = coupling * cell_integral(np.sin(pts) ** (n - 3)) if coupling else 0.0

    inner = np.where(unknown > 0, flux[np.maximum(unknown - 1, 0)], 0.0)
    diag = inner + flux[unknown] + potential
    offdiag = -flux[unknown[:-1]]
    return r[unknown], TridiagonalSystem(diag=diag, offdiag=offdiag, weight=weight)


def dense_radial(
    prob: CapProblem, l: int, count: int = 1, nodes: int = 2001
) -> list[tuple[float, float]]:
    """
    Richardson-extrapolated radial eigenvalues with certified tolerances.

    Returns:
        (value, |lambda(N) - lambda(2N)| * 4/3) per mode, ascending
    """
    coarse = eig_sym_tridiag(radial_system(prob, l, nodes)[1], count)
    fine = eig_sym_tridiag(radial_system(prob, l, 2 * nodes - 1)[1], count)
    result = []
    for (lam_n, _), (lam_2n, _) in zip(coarse, fine, strict=True):
        value = (4.0 * lam_2n - lam_n) / 3.0
        result.append((value, abs(lam_n - lam_2n) * 4.0 / 3.0))
    return result


def frobenius_start(
    n: int, l: int, lam: float, r0: float
) -> tuple[float, float]:
    """(phi, phi') at r0 from phi = r^l (1 + a r^2)."""
    coupling = angular_eigenvalue(n, l)
    a = (l * (n - 1) + coupling - 3.0 * lam) / (3.0 * (4 * l + 2 * n))
    phi = r0**l * (1.0 + a * r0**2)
    dphi = (l * r0 ** (l - 1) if l else 0.0) + (l + 2) * a * r0 ** (l + 1)
    return phi, dphi


def _shoot_radial(
    prob: CapProblem, l: int, lam: float, r0: float, cfg: IntegratorConfig
) -> Trajectory:
    n1 = prob.n - 1
    coupling = angular_eigenvalue(prob.n, l)

    def rhs(r: float, y: FloatArray) -> list[float]:
        s = math.sin(r)
        return [y[1], -n1 * math.cos(r) / s * y[1] - (lam - coupling / (s * s)) * y[0]]

    traj = integrate_ivp(rhs, r0, prob.R, frobenius_start(prob.n, l, lam, r0), cfg)
    if traj.blowup is not None:
        raise IntegrationError(
            f"radial shot blew up for lambda={lam}", location=traj.blowup.location
        )
    return traj


def cap_eigenvalue(
    prob: CapProblem,
    l: int,
    nodes: int = 2001,
    cfg: IntegratorConfig = RADIAL_INTEGRATOR,
) -> RadialEigen:
    """
    Fundamental radial eigenvalue of angular mode l in {0, 1}.

    Shooting from the Frobenius start is bracketed around the dense oracle;
    the bracket widens on failure and the start offset is refined when the
    launch fails.

    Raises:
        ValueError: If l is not 0 or 1
        BracketError: If no widened bracket holds a sign change
        IntegrationError: If every start offset fails
    """
    if l not in (0, 1):
        raise ValueError(f"l must be 0 or 1, got {l}")
    estimate, dense_tol = dense_radial(prob, l, 1, nodes)[0]

    last_error: Exception | None = None
    for r0 in START_OFFSETS:
        width = BRACKET_WIDTH
        for _ in range(MAX_WIDENINGS):
            lo, hi = estimate * (1.0 - width), estimate * (1.0 + width)
            try:
                lam = find_root(
                    lambda x, r0=r0: float(_shoot_radial(prob, l, x, r0, cfg).y_end[0]),
                    lo,
                    hi,
                    tol=1e-13 * max(1.0, hi),
                )
            except BracketError as e:
                last_error = e
                width *= 2.0
                logger.debug(f"widening radial bracket to {width:.2f} for l={l}")
                continue
            except IntegrationError as e:
                last_error = e
                logger.debug(f"radial start r0={r0:g} failed: {e}; refining")
                break
            return _radial_result(prob, l, lam, r0, cfg, estimate, dense_tol)
    raise last_error or IntegrationError(f"radial shooting failed for l={l}")


def _radial_result(
    prob: CapProblem,
    l: int,
    lam: float,
    r0: float,
    cfg: IntegratorConfig,
    estimate: float,
    dense_tol: float,
) -> RadialEigen:
    traj = _shoot_radial(prob, l, lam, r0, cfg)

    def evaluator(r: Any) -> FloatArray:
        rr = np.maximum(np.asarray(r, dtype=float), r0)
        return np.asarray(traj(rr), dtype=float)

    r = np.linspace(0.0, prob.R, OUTPUT_NODES)
    state = evaluator(r)
    samples, dphi = state[0], state[1]
    samples[0] = 1.0 if l == 0 else 0.0
    dphi[0] = 0.0 if l == 0 else 1.0
    samples[-1] = 0.0
    logger.debug(
        f"lambda(l={l}, n={prob.n}, R={prob.R}) = {lam:.14g} (dense {estimate:.10g})"
    )
    return RadialEigen(
        l=l,
        value=lam,
        r=r,
        samples=samples,
        dphi=dphi,
        tolerance=max(dense_tol, abs(lam - estimate), 10.0 * cfg.rel_tol * lam),
        method="shooting",
        evaluator=evaluator,
    )


def cap_ground_and_first(
    prob: CapProblem, nodes: int = 2001
) -> tuple[RadialEigen, RadialEigen]:
    """
    lambda_0 and lambda_1 of the ball.

    lambda_1 is the l = 1 fundamental; the second l = 0 mode is computed and
    used instead if it turns out lower.
    """
    ground = cap_eigenvalue(prob, 0, nodes)
    first = cap_eigenvalue(prob, 1, nodes)
    second_radial, tol = dense_radial(prob, 0, 2, nodes)[1]
    if second_radial < first.value - tol:
        logger.warning(
            f"second l=0 mode {second_radial:.10g} lies below l=1 "
            f"{first.value:.10g} for n={prob.n}, R={prob.R}"
        )
        first = RadialEigen(
            l=0,
            value=second_radial,
            r=first.r,
            samples=np.zeros_like(first.r),
            dphi=np.zeros_like(first.r),
            tolerance=tol,
            method="dense",
        )
    if not ground.value < first.value:
        raise DomainError(
            f"lambda_0={ground.value} is not below lambda_1={first.value}"
        )
    return ground, first


def verify_gap_chain(
    prob: CapProblem,
    model: ModelGap,
    eigen: tuple[RadialEigen, RadialEigen] | None = None,
    nodes: int = 2001,
) -> GapChainReport:
    """
    Margins of the gap chain for the ball against the model problem.

    The 3 pi^2/D^2 margin is included only for n >= 3.

    Raises:
        DomainError: If D >= pi or the model diameter differs from 2R
    """
    check_diameter(prob.D)
    if abs(model.D - prob.D) > 1e-12 or model.n != prob.n:
        raise DomainError(
            f"model problem (n={model.n}, D={model.D}) does not match the ball "
            f"(n={prob.n}, D={prob.D})"
        )
    ground, first = eigen if eigen is not None else cap_ground_and_first(prob, nodes)
    margins = {
        "gapComparison": (first.value - ground.value) - (model.mu1 - model.mu0),
        "groundState": ground.value - model.mu0,
    }
    if prob.n >= 3:
        margins["modelBound"] = (model.mu1 - model.mu0) - 3.0 * math.pi**2 / prob.D**2
    report = GapChainReport(
        n=prob.n,
        D=prob.D,
        lambda0=ground.value,
        lambda1=first.value,
        mu0=model.mu0,
        mu1=model.mu1,
        margins=margins,
        tolerance=ground.tolerance + first.tolerance + model.tolerance,
    )
    if not report.passed:
        logger.warning(f"gap chain failed for n={prob.n}, D={prob.D}: {margins}")
    return report


def hemisphere_limit(
    n: int, offsets: tuple[float, ...] = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
) -> tuple[list[tuple[float, float, float]], bool]:
    """
    (R, lambda_0, lambda_1) for R = pi/2 - offset, offsets decreasing.

    Returns:
        Rows and whether both eigenvalues decrease with R
    """
    rows = []
    for offset in sorted(offsets, reverse=True):
        prob = CapProblem(n=n, R=0.5 * math.pi - offset)
        ground, first = cap_ground_and_first(prob)
        rows.append((prob.R, ground.value, first.value))
    monotone = all(
        a[1] > b[1] and a[2] > b[2] for a, b in zip(rows, rows[1:], strict=False)
    )
    if not monotone:
        logger.warning(f"hemisphere limit not monotone for n={n}: {rows}")
    return rows, monotone


def center(n: int) -> FloatArray:
    p = np.zeros(n + 1)
    p[n] = 1.0
    return p


def ball_point(n: int, r: float, direction: FloatArray) -> FloatArray:
    """Point at geodesic distance r from the center along a unit direction."""
    w = np.zeros(n + 1)
    w[:n] = direction
    point: FloatArray = math.cos(r) * center(n) + math.sin(r) * w
    return point


def radial_tangent(x: FloatArray) -> tuple[float, FloatArray]:
    """(r, e_r) at x; e_r is the zero vector at the center."""
    p = center(x.size - 1)
    r = math.acos(max(-1.0, min(1.0, float(np.dot(x, p)))))
    if r == 0.0:
        return 0.0, np.zeros_like(x)
    tangent: FloatArray = -(p - math.cos(r) * x) / math.sin(r)
    return r, tangent


def geodesic(
    x: FloatArray, y: FloatArray
) -> tuple[float, Callable[[float], FloatArray], Callable[[float], FloatArray]]:
    """
    Great circle through x and y parametrised by arc length about the midpoint.

    Returns:
        (d, gamma, gamma') with gamma(-d/2) = x and gamma(d/2) = y

    Raises:
        DomainError: If x and y coincide or are antipodal
    """
    d = math.acos(max(-1.0, min(1.0, float(np.dot(x, y)))))
    total = x + y
    chord = y - x
    if np.linalg.norm(chord) < 1e-14 or np.linalg.norm(total) < 1e-14:
        raise DomainError("geodesic undefined for coincident or antipodal points")
    m = total / np.linalg.norm(total)
    v = chord / np.linalg.norm(chord)

    def gamma(s: float) -> FloatArray:
        point: FloatArray = math.cos(s) * m + math.sin(s) * v
        return point

    def velocity(s: float) -> FloatArray:
        vec: FloatArray = -math.sin(s) * m + math.cos(s) * v
        return vec

    return d, gamma, velocity


def two_point_lhs(
    x: FloatArray, y: FloatArray, phi0: RadialEigen
) -> tuple[float, float, float]:
    """
    <grad log phi0(y), gamma'(d/2)> - <grad log phi0(x), gamma'(-d/2)>.

    Returns:
        (d, lhs, geodesic self-test residual)
    """
    d, gamma, velocity = geodesic(x, y)
    r_x, e_x = radial_tangent(x)
    r_y, e_y = radial_tangent(y)
    g_x = float(phi0.log_derivative(r_x)[0]) if r_x > 0 else 0.0
    g_y = float(phi0.log_derivative(r_y)[0]) if r_y > 0 else 0.0
    lhs = g_y * float(np.dot(e_y, velocity(0.5 * d))) - g_x * float(
        np.dot(e_x, velocity(-0.5 * d))
    )
    error = max(
        float(np.linalg.norm(gamma(-0.5 * d) - x)),
        float(np.linalg.norm(gamma(0.5 * d) - y)),
        abs(float(np.linalg.norm(velocity(0.5 * d))) - 1.0),
    )
    return d, lhs, error


def sample_pairs(
    prob: CapProblem,
    count: int,
    seed: int = DEFAULT_SEED,
    rho: float = DEFAULT_RADIUS_FRACTION,
) -> list[tuple[FloatArray, FloatArray]]:
    """Pairs uniform in (r_x, r_y, relative angle) with radii in [0, rho R]."""
    if not 0 < rho < 1:
        raise DomainError(f"radius fraction must lie in (0, 1), got {rho}")
    rng = np.random.default_rng(seed)
    e1 = np.zeros(prob.n)
    e1[0] = 1.0
    e2 = np.zeros(prob.n)
    e2[1] = 1.0
    pairs: list[tuple[FloatArray, FloatArray]] = []
    while len(pairs) < count:
        r_x, r_y = rng.uniform(0.0, rho * prob.R, size=2)
        theta = rng.uniform(0.0, math.pi)
        x = ball_point(prob.n, float(r_x), e1)
        y = ball_point(prob.n, float(r_y), math.cos(theta) * e1 + math.sin(theta) * e2)
        if float(np.linalg.norm(x - y)) < 1e-9:
            continue
        pairs.append((x, y))
    return pairs


def sample_logconcavity(
    prob: CapProblem,
    phi0: RadialEigen,
    model: EigenPair,
    count: int = 2000,
    seed: int = DEFAULT_SEED,
    rho: float = DEFAULT_RADIUS_FRACTION,
    pairs: list[tuple[FloatArray, FloatArray]] | None = None,
) -> list[TwoPointSample]:
    """
    Both sides of the two-point inequality on sampled pairs.

    rhs = 2 (log phi~0)'(d/2) from the model ground state of the same (n, D).

    Raises:
        DomainError: If phi0 is not the l = 0 profile
    """
    if phi0.l != 0:
        raise DomainError(f"two-point inequality needs the l=0 profile, got l={phi0.l}")
    if pairs is None:
        pairs = sample_pairs(prob, count, seed, rho)
    samples = []
    for x, y in pairs:
        d, lhs, error = two_point_lhs(x, y, phi0)
        rhs = 2.0 * float(model.log_derivative(0.5 * d)[0])
        samples.append(TwoPointSample(x=x, y=y, d=d, lhs=lhs, rhs=rhs, geodesic_error=error))
    return samples


def symmetric_samples(
    prob: CapProblem,
    phi0: RadialEigen,
    model: EigenPair,
    fractions: tuple[float, ...] = tuple(0.1 * i for i in range(1, 19)),
) -> list[TwoPointSample]:
    """Pairs on a common diameter at distance d = fraction * R each side of center."""
    e1 = np.zeros(prob.n)
    e1[0] = 1.0
    pairs = [
        (ball_point(prob.n, 0.5 * f * prob.R, -e1), ball_point(prob.n, 0.5 * f * prob.R, e1))
        for f in fractions
    ]
    return sample_logconcavity(prob, phi0, model, pairs=pairs)


def logconcavity_verdict(samples: list[TwoPointSample], tol: float = 1e-6) -> Verdict:
    """Worst scaled margin; passes when margin >= -tol max(1, |rhs|) for all pairs."""
    worst = math.inf
    where: tuple[float, float] | None = None
    for sample in samples:
        scaled = sample.margin / max(1.0, abs(sample.rhs))
        if scaled < worst:
            worst = scaled
            where = (sample.d, 0.0)
    if not samples:
        worst = 0.0
    passed = worst >= -tol
    if not passed:
        logger.warning(f"two-point inequality violated: scaled margin {worst:.3e}")
    return Verdict(
        name="two-point",
        passed=passed,
        worst_margin=worst,
        checked=len(samples),
        location=where,
        message="geodesic balls only",
        constants={
            "geodesicError": max((s.geodesic_error for s in samples), default=0.0)
        },
    )


def modulus_checker(
    prob: CapProblem,
    phi0: RadialEigen,
    pairs: list[tuple[FloatArray, FloatArray]],
    tol: float = 1e-9,
) -> ModulusChecker:
    """
    Closure testing lhs(x, y) <= 2 psi(d/2) on fixed pairs.

    The left-hand sides are computed once; each call only evaluates psi.
    """
    d_half = np.empty(len(pairs))
    lhs = np.empty(len(pairs))
    for i, (x, y) in enumerate(pairs):
        d, value, _ = two_point_lhs(x, y, phi0)
        d_half[i] = 0.5 * d
        lhs[i] = value

    def check(psi: Callable[[Any], FloatArray]) -> bool:
        bound = 2.0 * psi(d_half)
        return bool(np.all(lhs <= bound + tol * np.maximum(1.0, np.abs(bound))))

    return check


def shift_oracle_factory(
    prob: CapProblem,
    ctx: ModelContext,
    grid: Grid1D,
    phi0: RadialEigen,
    count: int = 200,
    seed: int = DEFAULT_SEED,
) -> Callable[[int, float], ShiftOracle]:
    """
    s(k) oracles: does psi+_{k,s} bound the two-point quantity of the ball?

    Raises:
        DomainError: If the model context and the ball disagree on (n, D)
    """
    if ctx.n != prob.n or abs(ctx.D - prob.D) > 1e-12:
        raise DomainError("model context does not match the ball")
    check = modulus_checker(prob, phi0, sample_pairs(prob, count, seed))

    def factory(k: int, c: float) -> ShiftOracle:
        def oracle(s: float) -> bool:
            profile: SupersolutionProfile = supersolution(k, s, ctx, grid, c=c)
            return check(profile)

        return oracle

    return factory

"""
Pipelines behind the gaplab subcommands.

Each pipeline writes its files below the output directory and returns a
StageResult holding named verdicts and certified tolerances. The CLI turns
those into a manifest and an exit status.
"""

import logging
import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, TypeVar

import numpy as np

from . import __version__
from .cap_spectrum import (
    cap_eigenvalue,
    hemisphere_limit,
    logconcavity_verdict,
    sample_logconcavity,
    shift_oracle_factory,
    symmetric_samples,
    verify_gap_chain,
)
from .exceptions import ConfigValidationError, GapLabError
from .models.cap import DOMAIN_NOTE, CapProblem, GapChainReport
from .models.config import RunConfig, RunManifest
from .models.modulus import ModulusProfile
from .models.numerics import Grid1D
from .models.robin import ModelContext
from .models.spectrum import ModelGap, ModelProblem
from .parabolic_evolver import (
    ParabolicEvolver,
    boundary_barrier_check,
    erf_barrier_check,
    evolution_grid,
    evolve_mollified,
)
from .prufer_robin import (
    build_context,
    check_c_monotonicity,
    reconstruct_robin,
    robin_residual,
)
from .riccati_modulus import (
    ModulusFamily,
    dichotomy_check,
    envelope_margins,
    explicit_bounds,
    p_substitute,
    potential,
    potential_extrema,
    solve_branch_L,
    solve_branch_R,
    supersolution,
)
from .sl_spectrum import model_gap, model_gap_with_pairs, solve_spectrum_shooting
from .types import ManifestFileDict
from .utils import format_value, sha256_file, write_csv, write_json

logger = logging.getLogger(__name__)

T = TypeVar("T")

MANIFEST_NAME = "manifest.json"
ROBIN_TOLERANCE = 1e-6
BRANCH_TOLERANCE = 1e-6
FLOW_SUP_LIMIT = 1e-4
STATIONARY_LIMIT = 1e-4
KINK_JUMP_SLACK = 1e-8
# Envelopes are drawn at the shift when it clears the lambda~ threshold,
# otherwise this far above it.
ENVELOPE_SHIFT = 2.0
# Offsets from pi/2, decreasing; the last row is compared with the limits.
HEMISPHERE_OFFSETS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
HEMISPHERE_REL_TOL = 1e-2
COMPARISON_HORIZON = 1.0
ORACLE_PAIRS = 200


@dataclass
class StageResult:
    """Verdicts, tolerances and files produced by one pipeline."""

    name: str
    verdicts: dict[str, bool] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def record(self, key: str, passed: bool) -> None:
        self.verdicts[f"{self.name}.{key}"] = bool(passed)
        if not passed:
            logger.warning(f"verdict {self.name}.{key} failed")

    def merge(self, other: "StageResult") -> "StageResult":
        self.verdicts.update(other.verdicts)
        self.tolerances.update(other.tolerances)
        self.files.extend(other.files)
        return self


def worker_count() -> int:
    """
    Size of the sweep pool: GAPLAB_THREADS if set, else the CPU count.

    Raises:
        ConfigValidationError: If GAPLAB_THREADS is not a positive integer
    """
    raw = os.environ.get("GAPLAB_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigValidationError(
            f"GAPLAB_THREADS: expected a positive integer, got {raw!r}"
        ) from e
    if value < 1:
        raise ConfigValidationError(
            f"GAPLAB_THREADS: expected a positive integer, got {raw!r}"
        )
    return value


def run_stage(name: str, action: Callable[[], T]) -> T:
    """Run one pipeline stage, prefixing failures with the stage name."""
    logger.debug(f"stage {name} starting")
    try:
        return action()
    except GapLabError as e:
        raise type(e)(f"stage {name} failed: {e}", location=e.location) from e


def _sorted_map(func: Callable[[Any], T], keys: list[Any]) -> list[T]:
    # pool.map keeps input order, so results follow the sorted keys
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(func, sorted(keys)))


def run_eigen(cfg: RunConfig, out: Path) -> StageResult:
    """mu_0, mu_1 by shooting and dense oracle; eigenfunction samples."""
    result = StageResult("eigen")
    prob = ModelProblem.create(cfg.n, cfg.D, cfg.grid_nodes)
    gap, dense, shots = run_stage("eigen", lambda: model_gap_with_pairs(prob))

    limit = cfg.tolerance("oracle")
    oracle = []
    for d, s in zip(dense, shots, strict=True):
        relative = abs(s.value - d.value) / max(1.0, abs(d.value))
        oracle.append(
            {
                "index": d.index,
                "dense": d.value,
                "denseTolerance": d.tolerance,
                "shooting": s.value,
                "relative": relative,
                "signChanges": d.sign_changes,
            }
        )
        result.record(f"oracle{d.index}", relative <= limit)
        result.record(f"zeros{d.index}", d.sign_changes == d.index)
    if gap.bound_asserted:
        result.record("gapBound", gap.passed)
    result.tolerances["eigen.gap"] = gap.tolerance

    result.files.append(
        write_json(
            out / "eigen" / "mu0_mu1.json",
            {
                "gap": gap.to_dict(),
                "pairs": [pair.to_dict() for pair in shots],
                "oracle": oracle,
            },
        )
    )
    rows = zip(
        prob.grid.nodes,
        shots[0].samples,
        shots[0].dphi,
        shots[1].samples,
        shots[1].dphi,
        strict=True,
    )
    result.files.append(
        write_csv(
            out / "eigen" / "eigenfunctions.csv",
            ["z", "phi0", "dphi0", "phi1", "dphi1"],
            ([float(v) for v in row] for row in rows),
        )
    )
    return result


def _context(cfg: RunConfig) -> tuple[ModelProblem, ModelContext]:
    prob = ModelProblem.create(cfg.n, cfg.D, cfg.grid_nodes)
    return prob, run_stage("context", lambda: build_context(prob))


def run_robin(cfg: RunConfig, out: Path) -> StageResult:
    """c(eps), Robin eigenfunctions and their residuals for the configured eps."""
    result = StageResult("robin")
    prob, ctx = _context(cfg)
    eps_values = sorted(cfg.eps_values)
    c_values, increasing = run_stage(
        "robin", lambda: check_c_monotonicity(eps_values, ctx)
    )
    if len(eps_values) > 1:
        result.record("cIncreasing", increasing)

    summaries = []
    worst_boundary = 0.0
    worst_residual = 0.0
    for eps, c in zip(eps_values, c_values, strict=True):
        sol = run_stage("robin", lambda e=eps, cc=c: reconstruct_robin(e, ctx, prob.grid, c=cc))
        residual = robin_residual(sol, ctx, method="analytic")
        boundary = max(sol.boundary_residuals.values())
        worst_boundary = max(worst_boundary, boundary)
        worst_residual = max(worst_residual, residual)
        summary = sol.to_dict()
        summary["odeResidual"] = residual
        summaries.append(summary)
        result.files.append(
            write_csv(
                out / "robin" / f"robin_eps{format_value(eps)}.csv",
                ["z", "phi", "dphi", "q", "psi"],
                sol.rows(ctx.m),
            )
        )
    result.record("cPositive", all(c > 0 for c in c_values))
    result.record("boundary", worst_boundary <= ROBIN_TOLERANCE)
    result.record("odeResidual", worst_residual <= ROBIN_TOLERANCE)
    result.tolerances["robin.mu0"] = ctx.mu0_tolerance

    result.files.append(
        write_json(
            out / "robin" / "robin.json",
            {
                "n": ctx.n,
                "D": ctx.D,
                "mu0": ctx.mu0,
                "solutions": summaries,
                "cIncreasing": increasing,
            },
        )
    )
    return result


def modulus_family(
    cfg: RunConfig, prob: ModelProblem, ctx: ModelContext
) -> ModulusFamily:
    """Family of initial moduli, with the ball's shift oracle when n >= 2."""
    factory = None
    if cfg.use_oracle and cfg.n >= 2:
        cap = CapProblem.from_diameter(cfg.n, cfg.D)
        phi0 = run_stage("oracle", lambda: cap_eigenvalue(cap, 0, cfg.grid_nodes))
        factory = shift_oracle_factory(
            cap, ctx, prob.grid, phi0, count=min(cfg.pairs, ORACLE_PAIRS), seed=cfg.seed
        )
    return ModulusFamily(
        ctx,
        prob.grid,
        oracle_factory=factory,
        s_max=cfg.s_max,
        s_floor=cfg.s_floor,
        workers=worker_count(),
    )


def _branch_outputs(
    result: StageResult,
    k: int,
    family: ModulusFamily,
    grid: Grid1D,
    out: Path,
) -> dict[str, Any]:
    """
    Write the branches behind psi+_{k,s(k)} and their explicit envelopes.

    Returns:
        Summary entries for modulus.json
    """
    ctx = family.ctx
    c = family.c_of(k)
    s = family.shift_of(k)
    sup = supersolution(k, s, ctx, grid, c=c)
    z = grid.nodes
    tan_part = ctx.m * np.tan(z)
    left, right = sup.left(z), sup.right(z)
    result.files.append(
        write_csv(
            out / "modulus" / f"k{k}_branches.csv",
            ["z", "psi_L", "psi_R", "psi_plus", "p_L", "p_R", "V_L", "V_R"],
            (
                [float(v) for v in row]
                for row in zip(
                    z,
                    left,
                    right,
                    sup.samples,
                    left - tan_part,
                    right - tan_part,
                    potential(z, sup.left.c, ctx),
                    potential(z, sup.right.c, ctx),
                    strict=True,
                )
            ),
        )
    )
    residuals = {
        "L": p_substitute(sup.left, ctx).residual,
        "R": p_substitute(sup.right, ctx).residual,
    }
    result.record(
        f"k{k}.pSubstitution", max(residuals.values()) <= BRANCH_TOLERANCE
    )

    v_inf, v_sup = potential_extrema(c, ctx)
    threshold = max(-v_inf, v_sup)
    s_env = s if s > threshold else threshold + ENVELOPE_SHIFT
    if s_env == s:
        env_left, env_right = sup.left, sup.right
    else:
        env_left = solve_branch_L(c + s_env, ctx, grid)
        env_right = solve_branch_R(k, c - s_env, ctx, grid)
    envelopes = explicit_bounds(k, c, s_env, ctx, grid)
    margins = envelope_margins(env_left, env_right, envelopes)
    result.record(
        f"k{k}.envelopes", all(m >= -BRANCH_TOLERANCE for m in margins.values())
    )

    rows = []
    for env in envelopes.all():
        branch = env_left if env.name.endswith("left") else env_right
        values = branch(env.z)
        rows.extend(
            (env.name, float(zz), float(bound), float(value))
            for zz, bound, value in zip(env.z, env.values, values, strict=True)
        )
    result.files.append(
        write_csv(
            out / "modulus" / f"k{k}_envelopes.csv",
            ["envelope", "z", "bound", "branch"],
            rows,
        )
    )
    return {
        "supersolution": {
            "s": s,
            "crossingZ": sup.crossing_z,
            "left": sup.left.to_dict(),
            "right": sup.right.to_dict(),
            "substitutionResidual": residuals,
        },
        "envelopes": {
            "s": s_env,
            "threshold": threshold,
            "parameters": {env.name: env.parameter for env in envelopes.all()},
            "margins": margins,
        },
    }


def run_modulus(
    cfg: RunConfig,
    out: Path,
    context: tuple[ModelProblem, ModelContext] | None = None,
) -> tuple[StageResult, ModulusFamily, dict[int, ModulusProfile]]:
    """
    Initial moduli psi_{k,0} and stationary psi~_{k,0} for every k.

    Also writes the branches of psi+_{k,s(k)} and their explicit envelopes.
    """
    result = StageResult("modulus")
    prob, ctx = context or _context(cfg)
    family = modulus_family(cfg, prob, ctx)
    z = prob.grid.nodes
    profiles: dict[int, ModulusProfile] = {}
    entries = []
    previous: ModulusProfile | None = None

    for k in sorted(set(cfg.k_list)):
        profile = run_stage("modulus", lambda kk=k: family.initial(kk))
        tilde = family.stationary(k)
        profiles[k] = profile
        c = family.c_of(k)

        exact_ends = profile.samples[0] == 0.0 and profile.samples[-1] == -float(k)
        jumps_ok = all(jump <= KINK_JUMP_SLACK for jump in profile.kink_jumps)
        kind, low, high = dichotomy_check(profile, tilde)
        left = solve_branch_L(c, ctx, prob.grid)(z)
        right = solve_branch_R(k, c, ctx, prob.grid)(z)
        identity = max(
            float(np.max(np.abs(left - tilde.samples))),
            float(np.max(np.abs(right[1:] - tilde.samples[1:]))),
        )
        result.record(f"k{k}.boundary", exact_ends)
        result.record(f"k{k}.kinkJumps", jumps_ok)
        result.record(f"k{k}.dichotomy", kind != "violated")
        result.record(f"k{k}.branchIdentity", identity <= BRANCH_TOLERANCE)
        if previous is not None:
            result.record(
                f"k{k}.nonIncreasing",
                bool(np.all(profile.samples <= previous.samples + 1e-12)),
            )
        previous = profile

        entry = profile.to_dict()
        entry.update(
            {
                "c": c,
                "shift": family.shift_of(k),
                "dichotomy": {"kind": kind, "minDiff": low, "supDiff": high},
                "branchIdentity": identity,
            }
        )
        entry.update(_branch_outputs(result, k, family, prob.grid, out))
        if k in family.searches:
            entry["search"] = family.searches[k].to_dict()
        entries.append(entry)
        result.files.append(
            write_csv(
                out / "modulus" / f"psi_k{k}.csv",
                ["z", "psi_k0", "psi_tilde", "piece"],
                (
                    (zz, psi, float(t), piece)
                    for (zz, psi, piece), t in zip(
                        profile.rows(), tilde.samples, strict=True
                    )
                ),
            )
        )

    result.files.append(
        write_json(
            out / "modulus" / "modulus.json",
            {
                "n": ctx.n,
                "D": ctx.D,
                "mu0": ctx.mu0,
                "sFloor": cfg.s_floor,
                "profiles": entries,
            },
        )
    )
    return result, family, profiles


def run_flow(cfg: RunConfig, out: Path) -> StageResult:
    """
    End-to-end flow: Robin shift, initial modulus, then the parabolic evolution.

    Barrier checks are diagnostics; they are written to the reports but do not
    enter the verdicts.
    """
    context = _context(cfg)
    _, ctx = context
    stage, family, profiles = run_modulus(cfg, out, context)
    result = StageResult("flow").merge(stage)
    grid = evolution_grid(ctx, cfg.evolution_nodes)

    for k, profile in sorted(profiles.items()):
        tilde = family.stationary(k)
        evolver = ParabolicEvolver(
            ctx,
            grid,
            tilde,
            step_rtol=cfg.tolerance("stepRtol"),
            step_atol=cfg.tolerance("stepAtol"),
        )
        report = run_stage(
            "flow", lambda p=profile, e=evolver: e.evolve(
                p,
                cfg.t_end,
                cfg.tolerance("flow"),
                snapshot_times=cfg.snapshot_times,
            ),
        )
        u0 = report.u_initial
        horizon = min(COMPARISON_HORIZON, cfg.t_end)
        comparison = evolver.comparison_test(np.zeros_like(u0), u0, horizon)
        erf_verdict = erf_barrier_check(evolver, report, 0.25 * ctx.D, 0.1)
        boundary_verdict = boundary_barrier_check(evolver, report, profile)

        result.record(
            f"k{k}.converged",
            report.converged and report.final_sup_error < FLOW_SUP_LIMIT,
        )
        result.record(f"k{k}.monotone", report.monotonicity_violations == 0)
        result.record(f"k{k}.sandwich", report.sandwich_violations == 0)
        result.record(
            f"k{k}.stationary", report.stationary_residual_final <= STATIONARY_LIMIT
        )
        result.record(f"k{k}.comparison", comparison.passed)
        result.tolerances[f"flow.k{k}.supError"] = report.final_sup_error

        summary = report.to_dict()
        summary["comparison"] = comparison.to_dict()
        summary["diagnostics"] = [erf_verdict.to_dict(), boundary_verdict.to_dict()]
        if cfg.mollify_eps is not None:
            eps = cfg.mollify_eps
            mollified = run_stage(
                "flow",
                lambda p=profile, e=evolver: evolve_mollified(
                    e, p, eps, cfg.t_end, cfg.tolerance("flow")
                ),
            )
            agreement = float(
                np.max(np.abs(mollified.final_state.psi - report.final_state.psi))
            )
            summary["mollified"] = {**mollified.to_dict(), "eps": eps, "agreement": agreement}
            result.record(f"k{k}.mollifiedAgreement", agreement < FLOW_SUP_LIMIT)

        result.files.append(
            write_json(out / "flow" / f"k{k}_report.json", summary)
        )
        result.files.append(
            write_csv(
                out / "flow" / f"k{k}_timeseries.csv",
                [
                    "t",
                    "sup_error",
                    "max_dpsi_dt",
                    "min_dpsi_dt",
                    "sandwich_lower",
                    "sandwich_upper",
                ],
                report.rows(),
            )
        )
        initial_psi = u0 + evolver.psi_tilde
        columns = [grid.nodes, initial_psi]
        columns += [snap.psi for snap in report.snapshots]
        columns += [report.final_state.psi, evolver.psi_tilde]
        header = ["z", "psi_initial"]
        header += [f"psi_t{format_value(snap.requested)}" for snap in report.snapshots]
        header += ["psi_final", "psi_tilde"]
        result.files.append(
            write_csv(
                out / "flow" / f"k{k}_snapshots.csv",
                header,
                ([float(v) for v in row] for row in zip(*columns, strict=True)),
            )
        )
    return result


def _gap_entry(cfg: RunConfig) -> Callable[[tuple[int, float]], GapChainReport]:
    def entry(key: tuple[int, float]) -> GapChainReport:
        n, D = key
        model: ModelGap = model_gap(ModelProblem.create(n, D, cfg.grid_nodes))
        return verify_gap_chain(
            CapProblem.from_diameter(n, D), model, nodes=cfg.grid_nodes
        )

    return entry


def run_verify_gap(cfg: RunConfig, out: Path) -> StageResult:
    """Gap chain over the sweep, two-point sampling and the hemisphere row."""
    result = StageResult("gap")
    keys = [(n, D) for n in cfg.sweep_n for D in cfg.sweep_D]
    reports = run_stage("gap", lambda: _sorted_map(_gap_entry(cfg), keys))

    rows = []
    for report in reports:
        label = f"n{report.n}_D{format_value(report.D)}"
        result.record(label, report.passed)
        result.tolerances[f"gap.{label}"] = report.tolerance
        result.files.append(write_json(out / "gap" / f"gap_{label}.json", report.to_dict()))
        rows.append(
            (
                report.n,
                report.D,
                report.lambda0,
                report.lambda1,
                report.mu0,
                report.mu1,
                report.margins["gapComparison"],
                report.margins["groundState"],
                report.margins.get("modelBound", ""),
                report.tolerance,
                report.passed,
            )
        )
    result.files.append(
        write_csv(
            out / "gap" / "summary.csv",
            [
                "n",
                "D",
                "lambda0",
                "lambda1",
                "mu0",
                "mu1",
                "gap_comparison",
                "ground_state",
                "model_bound",
                "tolerance",
                "passed",
            ],
            rows,
        )
    )

    if cfg.n >= 2:
        result.merge(run_stage("two-point", lambda: _two_point(cfg, out)))
    result.merge(run_stage("hemisphere", lambda: _hemisphere(out)))
    return result


def _two_point(cfg: RunConfig, out: Path) -> StageResult:
    result = StageResult("gap")
    cap = CapProblem.from_diameter(cfg.n, cfg.D)
    phi0 = cap_eigenvalue(cap, 0, cfg.grid_nodes)
    model = solve_spectrum_shooting(ModelProblem.create(cfg.n, cfg.D, cfg.grid_nodes), 0)
    samples = sample_logconcavity(cap, phi0, model, cfg.pairs, cfg.seed)
    symmetric = symmetric_samples(cap, phi0, model)
    tol = cfg.tolerance("twoPoint")
    verdict = logconcavity_verdict(samples, tol)
    symmetric_verdict = logconcavity_verdict(symmetric, tol)
    label = f"n{cfg.n}_D{format_value(cfg.D)}"
    result.record(f"twoPoint.{label}", verdict.passed)
    result.record(f"twoPointSymmetric.{label}", symmetric_verdict.passed)
    result.tolerances["gap.twoPoint"] = tol

    header = ["x_dot_y", "d", "lhs", "rhs", "margin"]
    result.files.append(
        write_csv(out / "gap" / f"twopoint_{label}.csv", header, (s.row() for s in samples))
    )
    result.files.append(
        write_csv(
            out / "gap" / f"twopoint_symmetric_{label}.csv",
            header,
            (s.row() for s in symmetric),
        )
    )
    result.files.append(
        write_json(
            out / "gap" / f"twopoint_{label}.json",
            {
                "sampled": verdict.to_dict(),
                "symmetric": symmetric_verdict.to_dict(),
                "seed": cfg.seed,
                "pairs": cfg.pairs,
                "note": DOMAIN_NOTE,
            },
        )
    )
    return result


def _hemisphere(out: Path, n: int = 3) -> StageResult:
    result = StageResult("gap")
    rows, monotone = hemisphere_limit(n, HEMISPHERE_OFFSETS)
    R, lambda0, lambda1 = rows[-1]
    exact0, exact1 = float(n), float(2 * (n + 1))
    err0 = abs(lambda0 - exact0) / exact0
    err1 = abs(lambda1 - exact1) / exact1
    result.record(f"hemisphere.n{n}", max(err0, err1) <= HEMISPHERE_REL_TOL)
    result.record(f"hemisphereMonotone.n{n}", monotone)
    result.files.append(
        write_json(
            out / "gap" / "hemisphere.json",
            {
                "n": n,
                "R": R,
                "lambda0": lambda0,
                "lambda1": lambda1,
                "limit0": exact0,
                "limit1": exact1,
                "gap": lambda1 - lambda0,
                "relativeErrors": [err0, err1],
                "approach": [
                    {"R": r, "lambda0": l0, "lambda1": l1} for r, l0, l1 in rows
                ],
                "monotone": monotone,
            },
        )
    )
    return result


def run_sweep(cfg: RunConfig, out: Path) -> StageResult:
    """Model gap bound over the sweep grid of (n, D)."""
    result = StageResult("sweep")
    keys = [(n, D) for n in cfg.sweep_n for D in cfg.sweep_D]

    def entry(key: tuple[int, float]) -> ModelGap:
        n, D = key
        return model_gap(ModelProblem.create(n, D, cfg.grid_nodes))

    gaps = run_stage("sweep", lambda: _sorted_map(entry, keys))
    rows = []
    for gap in gaps:
        label = f"n{gap.n}_D{format_value(gap.D)}"
        result.record(label, gap.passed)
        result.tolerances[f"sweep.{label}"] = gap.tolerance
        rows.append(
            (gap.n, gap.D, gap.mu0, gap.mu1, gap.gap, gap.bound, gap.margin,
             gap.tolerance, gap.bound_asserted, gap.passed)
        )
    result.files.append(
        write_csv(
            out / "sweep" / "model_gap.csv",
            ["n", "D", "mu0", "mu1", "gap", "bound", "margin", "tolerance",
             "bound_asserted", "passed"],
            rows,
        )
    )
    result.files.append(
        write_json(out / "sweep" / "model_gap.json", [gap.to_dict() for gap in gaps])
    )
    return result


def write_manifest(
    out: Path, command: str, cfg: RunConfig, result: StageResult
) -> RunManifest:
    """
    List every file under ``out`` (except the manifest) with its checksum.

    The manifest carries a timestamp; the data files themselves do not, so
    reruns with the same config reproduce their checksums.
    """
    files: list[ManifestFileDict] = []
    for path in sorted(p for p in out.rglob("*") if p.is_file()):
        rel = path.relative_to(out).as_posix()
        if rel == MANIFEST_NAME:
            continue
        files.append(
            ManifestFileDict(
                path=rel, sha256=sha256_file(path), bytes=path.stat().st_size
            )
        )
    manifest = RunManifest(
        version=__version__,
        command=command,
        created_at=datetime.now(timezone.utc).isoformat(),
        config=cfg,
        verdicts=result.verdicts,
        tolerances=result.tolerances,
        files=files,
        note=DOMAIN_NOTE if command in ("verify-gap", "modulus", "flow") else None,
    )
    write_json(out / MANIFEST_NAME, manifest.to_dict())
    return manifest


PIPELINES: dict[str, Callable[[RunConfig, Path], StageResult]] = {
    "eigen": run_eigen,
    "robin": run_robin,
    "modulus": lambda cfg, out: run_modulus(cfg, out)[0],
    "flow": run_flow,
    "verify-gap": run_verify_gap,
    "sweep": run_sweep,
}

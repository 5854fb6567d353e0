"""Tests for the parabolic modulus flow."""

import math

import numpy as np
import pytest

from gaplab.exceptions import DomainError
from gaplab.models import Grid1D, ModelContext, ModulusProfile
from gaplab.models.evolution import ConvergenceReport
from gaplab.models.numerics import SpacingKind
from gaplab.parabolic_evolver import (
    ParabolicEvolver,
    boundary_barrier,
    boundary_barrier_check,
    decay_rate,
    erf_barrier_check,
    erf_profile,
    evolution_grid,
    evolve_mollified,
    mollify_initial,
    rhs_psi,
    spatial_order,
    stationary_residual,
    temporal_order,
)

T_END = 30.0


@pytest.fixture(scope="module")
def flow_run(
    evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
) -> ConvergenceReport:
    """Full evolution from psi_{2,0} for n=2, D=2."""
    return evolver_k2.evolve(initial_k2, T_END, tol=1e-6)


class TestRightHandSide:
    """Test the psi-equation right-hand side."""

    def test_flat_zero_field(self) -> None:
        """Test n=1, psi = 0 gives -2 mu0 tan z."""
        grid = Grid1D.build(0.0, 0.5, 51)
        mu0 = math.pi**2
        rhs = rhs_psi(np.zeros(grid.size), grid, 1, mu0)
        z = grid.nodes[1:-1]
        assert np.allclose(rhs[1:-1], -2.0 * mu0 * np.tan(z), atol=1e-12)
        assert rhs[0] == 0.0
        assert rhs[-1] == 0.0

    def test_linear_field(self) -> None:
        """Test psi = -2kz/D against the hand-expanded expression."""
        n, D, k, mu0 = 2, 2.0, 2, 1.3
        grid = Grid1D.build(0.0, 0.5 * D, 41)
        z = grid.nodes
        psi = -2.0 * k * z / D
        slope = -2.0 * k / D
        tan = np.tan(z)
        expected = (
            2.0 * slope * psi
            - (n + 1) * tan * slope
            - 2.0 * tan * psi**2
            - (n - 1) * (1.0 - tan**2) * psi
            - 2.0 * mu0 * tan
        )
        rhs = rhs_psi(psi, grid, n, mu0)
        for i in (3, 10, 20, 30, 37):
            assert rhs[i] == pytest.approx(expected[i], abs=1e-9)

    def test_stationary_modulus_is_near_fixed_point(
        self, ctx_n2: ModelContext, tilde_k2: ModulusProfile
    ) -> None:
        """Test rhs(psi~_{k,0}) shrinks at second order under refinement."""
        sups = []
        for count in (101, 201):
            grid = evolution_grid(ctx_n2, count)
            rhs = rhs_psi(tilde_k2(grid.nodes), grid, ctx_n2.n, ctx_n2.mu0)
            sups.append(float(np.max(np.abs(rhs))))
        assert sups[1] < sups[0] / 2.5

    def test_spatial_order(self, ctx_n2: ModelContext) -> None:
        """Test second-order consistency on psi = sin z."""
        n, mu0 = ctx_n2.n, ctx_n2.mu0

        def exact(z: np.ndarray) -> np.ndarray:
            s, c, t = np.sin(z), np.cos(z), np.tan(z)
            return (
                -s
                + 2.0 * c * s
                - (n + 1) * t * c
                - 2.0 * t * s**2
                - (n - 1) * (1.0 - t**2) * s
                - 2.0 * mu0 * t
            )

        assert spatial_order(np.sin, exact, ctx_n2, 101) >= 1.8


class TestEvolver:
    """Test construction and single steps."""

    def test_rejects_graded_grid(
        self, ctx_n2: ModelContext, tilde_k2: ModulusProfile
    ) -> None:
        """Test the evolution grid must be uniform."""
        grid = Grid1D.build(0.0, ctx_n2.half, 101, SpacingKind.GRADED_RIGHT)
        with pytest.raises(DomainError, match="uniform"):
            ParabolicEvolver(ctx_n2, grid, tilde_k2)

    def test_rejects_wrong_span(
        self, ctx_n2: ModelContext, tilde_k2: ModulusProfile
    ) -> None:
        """Test the evolution grid must span [0, D/2]."""
        with pytest.raises(DomainError, match="must span"):
            ParabolicEvolver(ctx_n2, Grid1D.build(0.0, 0.5, 101), tilde_k2)

    def test_coefficients(self, evolver_k2: ParabolicEvolver) -> None:
        """Test a1 = 2 psi~ - (n+1) tan z."""
        coeffs = evolver_k2.coefficients()
        z = evolver_k2.z
        expected = 2.0 * evolver_k2.tilde(z) - 3.0 * np.tan(z)
        assert np.allclose(coeffs.a1, expected)
        a1_sup, a2_sup = coeffs.bounds
        assert a1_sup > 0 and a2_sup > 0

    def test_stationary_step(self, evolver_k2: ParabolicEvolver) -> None:
        """Test u = 0 is a fixed point of a step."""
        state = evolver_k2.state_from_u(np.zeros(evolver_k2.z.size))
        after = evolver_k2.step(state, 1e-3)
        assert np.max(np.abs(after.u)) <= 1e-12
        assert after.step_count == 1
        assert after.t == pytest.approx(1e-3)

    def test_step_keeps_boundary_values(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test psi(0) = 0 and psi(D/2) = -k after a step; u matches psi - psi~."""
        state = evolver_k2.state_from_profile(initial_k2)
        after = evolver_k2.step(state, 1e-4)
        assert after.psi[0] == 0.0
        assert after.psi[-1] == -2.0
        assert after.u[0] == 0.0
        assert after.u[-1] == 0.0
        assert np.allclose(after.psi - evolver_k2.psi_tilde, after.u)

    def test_step_decreases_near_kinks(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test the first step lowers psi next to each kink."""
        state = evolver_k2.state_from_profile(initial_k2)
        after = evolver_k2.step(state, 1e-5)
        for zk in initial_k2.kinks:
            i = int(np.argmin(np.abs(evolver_k2.z - zk)))
            assert after.psi[i] < state.psi[i]

    def test_temporal_order(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test the scheme is first order in time."""
        u = mollify_initial(evolver_k2, initial_k2, 0.2)
        assert temporal_order(evolver_k2, u, 0.1, 10) >= 0.7


class TestEvolve:
    """Test full runs of the flow."""

    def test_stationary_initial_data(
        self, evolver_k2: ParabolicEvolver, tilde_k2: ModulusProfile
    ) -> None:
        """Test psi~_{k,0} as initial data converges at t = 0."""
        report = evolver_k2.evolve(tilde_k2, 1.0)
        assert report.converged
        assert report.times == [0.0]
        assert report.final_sup_error <= 1e-12

    def test_converges(self, flow_run: ConvergenceReport) -> None:
        """Test uniform convergence to psi~_{k,0} for the standard case."""
        assert flow_run.converged
        assert flow_run.final_sup_error < 1e-4
        assert flow_run.decay_rate is not None and flow_run.decay_rate > 0

    def test_monotone_and_sandwiched(self, flow_run: ConvergenceReport) -> None:
        """Test no monotonicity or sandwich violations."""
        assert flow_run.monotonicity_violations == 0
        assert flow_run.sandwich_violations == 0
        assert flow_run.passed

    def test_strictly_decreasing(self, flow_run: ConvergenceReport) -> None:
        """Test a positive strictness threshold after t = 0.01."""
        assert flow_run.strict_delta is not None
        assert flow_run.strict_delta > 0

    def test_lipschitz_bounded(self, flow_run: ConvergenceReport) -> None:
        """Test the discrete Lipschitz constant stays bounded over the run."""
        assert flow_run.lipschitz_max <= 2.0 * flow_run.lipschitz_initial

    def test_boundary_preserved(self, flow_run: ConvergenceReport) -> None:
        """Test the final field keeps (0, -k)."""
        assert flow_run.final_state.psi[0] == 0.0
        assert flow_run.final_state.psi[-1] == -2.0

    def test_stationary_residual(
        self, flow_run: ConvergenceReport, evolver_k2: ParabolicEvolver
    ) -> None:
        """Test the final field solves the stationary equation to grid accuracy."""
        assert flow_run.stationary_residual_final < 1e-2
        assert flow_run.stationary_residual_final == pytest.approx(
            stationary_residual(
                flow_run.final_state.psi,
                evolver_k2.grid,
                evolver_k2.ctx.n,
                evolver_k2.ctx.mu0,
                evolver_k2.c,
            )
        )

    def test_short_horizon_reports_failure(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test non-convergence is reported, not raised."""
        report = evolver_k2.evolve(initial_k2, 0.01)
        assert not report.converged
        assert not report.passed
        assert report.times[-1] == pytest.approx(0.01)

    def test_snapshots_at_requested_times(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test psi is kept at the first step past each requested time."""
        report = evolver_k2.evolve(
            initial_k2, 0.5, snapshot_times=(5.0, 0.05, 0.0, 0.2)
        )
        snaps = report.snapshots
        assert [s.requested for s in snaps] == [0.0, 0.05, 0.2, 5.0]
        assert snaps[0].t == 0.0
        np.testing.assert_allclose(
            snaps[0].psi, report.u_initial + evolver_k2.psi_tilde
        )
        assert 0.05 <= snaps[1].t < 0.1
        assert 0.2 <= snaps[2].t < 0.25
        assert snaps[3].t == report.times[-1]
        np.testing.assert_array_equal(snaps[3].psi, report.final_state.psi)

        sups = [float(np.max(s.psi - evolver_k2.psi_tilde)) for s in snaps]
        assert all(b <= a + 1e-6 for a, b in zip(sups, sups[1:], strict=False))
        assert report.to_dict()["snapshots"][1]["requested"] == 0.05

    def test_snapshots_of_stationary_data(
        self, evolver_k2: ParabolicEvolver, tilde_k2: ModulusProfile
    ) -> None:
        """Test every snapshot of stationary data is taken at t = 0."""
        report = evolver_k2.evolve(tilde_k2, 1.0, snapshot_times=(0.5, 2.0))
        assert [s.t for s in report.snapshots] == [0.0, 0.0]

    def test_rows_and_dict(self, flow_run: ConvergenceReport) -> None:
        """Test the time series and summary shapes."""
        rows = flow_run.rows()
        assert len(rows) == len(flow_run.times)
        assert len(rows[0]) == 6
        data = flow_run.to_dict()
        assert data["converged"] is True
        assert data["steps"] == len(flow_run.times) - 1


class TestComparison:
    """Test the comparison principle."""

    def test_zero_below_initial_gap(
        self, evolver_k2: ParabolicEvolver, flow_run: ConvergenceReport
    ) -> None:
        """Test 0 <= u0 is preserved."""
        u0 = flow_run.u_initial
        verdict = evolver_k2.comparison_test(np.zeros_like(u0), u0, 1.0)
        assert verdict.passed
        assert verdict.checked > 0

    def test_equal_data(
        self, evolver_k2: ParabolicEvolver, flow_run: ConvergenceReport
    ) -> None:
        """Test equal initial data stay equal."""
        u0 = flow_run.u_initial
        verdict = evolver_k2.comparison_test(u0, u0.copy(), 0.2)
        assert verdict.passed
        assert verdict.worst_margin >= 0.0

    def test_bump(self, evolver_k2: ParabolicEvolver) -> None:
        """Test v = u + bump stays above u through t = 1."""
        z = evolver_k2.z
        half = evolver_k2.ctx.half
        u = 0.05 * np.sin(np.pi * z / half)
        bump = 0.02 * np.exp(-(((z - 0.5 * half) / 0.1) ** 2))
        verdict = evolver_k2.comparison_test(u, u + bump, 1.0)
        assert verdict.passed


class TestBarriers:
    """Test the barrier diagnostics."""

    def test_erf_profile(self) -> None:
        """Test phi(0) = 2/sqrt(pi) and evenness."""
        assert float(erf_profile(0.0)) == pytest.approx(2.0 / math.sqrt(math.pi))
        x = np.linspace(0.1, 3.0, 10)
        assert np.allclose(erf_profile(x), erf_profile(-x))
        assert np.all(np.diff(erf_profile(x)) > 0)

    def test_boundary_barrier_shape(self) -> None:
        """Test f is concave increasing with f(0) = 0."""
        x = np.linspace(0.0, 1.0, 50)
        f = boundary_barrier(x, 3.0, math.log(0.25))
        assert f[0] == 0.0
        assert np.all(np.diff(f) > 0)
        assert np.all(np.diff(f, 2) < 0)
        assert f[-1] == pytest.approx(math.log(1.0 + 3.0 / 0.25) / 3.0)

    def test_erf_barrier(
        self, evolver_k2: ParabolicEvolver, flow_run: ConvergenceReport
    ) -> None:
        """Test tau = 0.1, z0 = D/4 holds over (0, 1/mu_tau]."""
        verdict = erf_barrier_check(evolver_k2, flow_run, 0.5, 0.1)
        assert verdict.passed
        assert verdict.constants["tMax"] == pytest.approx(
            1.0 / verdict.constants["muTau"]
        )
        assert verdict.worst_margin <= 0.1 + 1e-12

    def test_boundary_barrier(
        self,
        evolver_k2: ParabolicEvolver,
        flow_run: ConvergenceReport,
        initial_k2: ModulusProfile,
    ) -> None:
        """Test the first 100 steps stay inside the boundary barrier."""
        verdict = boundary_barrier_check(evolver_k2, flow_run, initial_k2)
        assert verdict.passed
        assert verdict.constants["sigma"] <= evolver_k2.ctx.half

    def test_boundary_barrier_stationary(
        self, evolver_k2: ParabolicEvolver, tilde_k2: ModulusProfile
    ) -> None:
        """Test a stationary run is trivially inside."""
        report = evolver_k2.evolve(tilde_k2, 1.0)
        assert boundary_barrier_check(evolver_k2, report, tilde_k2).passed


class TestMollification:
    """Test smoothed initial data."""

    def test_bounds(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test 0 <= u0^eps <= u0 and sup |u0^eps - u0| <= eps."""
        eps = 0.05
        u0 = evolver_k2.state_from_profile(initial_k2).u
        smooth = mollify_initial(evolver_k2, initial_k2, eps)
        assert np.all(smooth >= 0.0)
        assert np.all(smooth <= u0 + 1e-15)
        assert np.max(np.abs(smooth - u0)) <= eps + 1e-12
        assert smooth[0] == 0.0 and smooth[-1] == 0.0

    def test_agrees_near_ends(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test u0^eps = u0 on the end layers."""
        u0 = evolver_k2.state_from_profile(initial_k2).u
        smooth = mollify_initial(evolver_k2, initial_k2, 0.05)
        assert smooth[1] == pytest.approx(u0[1])
        assert smooth[-2] == pytest.approx(u0[-2])

    def test_non_positive_eps(
        self, evolver_k2: ParabolicEvolver, initial_k2: ModulusProfile
    ) -> None:
        """Test eps must be positive."""
        with pytest.raises(DomainError, match="eps must be positive"):
            mollify_initial(evolver_k2, initial_k2, 0.0)

    def test_mollified_run_agrees(
        self,
        evolver_k2: ParabolicEvolver,
        initial_k2: ModulusProfile,
        flow_run: ConvergenceReport,
    ) -> None:
        """Test the mollified run reaches the same limit."""
        report = evolve_mollified(evolver_k2, initial_k2, 0.05, T_END)
        assert report.converged
        gap = np.max(np.abs(report.final_state.psi - flow_run.final_state.psi))
        assert gap < 1e-4


class TestDecayRate:
    """Test the exponential rate fit."""

    def test_exact_exponential(self) -> None:
        """Test exp(-2t) gives rate 2."""
        t = np.linspace(0.0, 5.0, 50)
        assert decay_rate(list(t), list(np.exp(-2.0 * t))) == pytest.approx(2.0)

    def test_too_short(self) -> None:
        """Test short series give no rate."""
        assert decay_rate([0.0, 1.0], [1.0, 0.5]) is None

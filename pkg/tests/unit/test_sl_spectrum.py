"""Tests for the model operator spectrum."""

import math

import numpy as np
import pytest

from gaplab.exceptions import DomainError
from gaplab.models.spectrum import ModelProblem, Normalization, Parity
from gaplab.sl_spectrum import (
    count_sign_changes,
    dense_full_modes,
    dense_rounding,
    interlacing_bracket,
    model_gap,
    model_gap_with_pairs,
    solve_spectrum_dense,
    solve_spectrum_shooting,
)

NODES = 401


class TestModelProblem:
    """Test problem construction."""

    def test_create(self) -> None:
        """Test default grid spans [0, D/2]."""
        prob = ModelProblem.create(n=3, D=2.0, nodes=NODES)
        assert prob.half == 1.0
        assert prob.m == 1.0
        assert prob.grid.nodes[-1] == 1.0

    @pytest.mark.parametrize("D", [0.0, -1.0, math.pi, 4.0])
    def test_diameter_out_of_range(self, D: float) -> None:
        """Test D outside (0, pi) is rejected."""
        with pytest.raises(DomainError, match="diameter out of range"):
            ModelProblem.create(n=2, D=D)

    def test_dimension(self) -> None:
        """Test n must be positive."""
        with pytest.raises(DomainError, match="dimension"):
            ModelProblem.create(n=0, D=1.0)


class TestDenseOracle:
    """Test the weighted tridiagonal oracle."""

    def test_flat_case(self) -> None:
        """Test n=1 reproduces (i+1)^2 pi^2 / D^2."""
        prob = ModelProblem.create(n=1, D=1.0, nodes=NODES)
        mu0, mu1 = solve_spectrum_dense(prob, 2)
        assert mu0.value == pytest.approx(math.pi**2, rel=1e-7)
        assert mu1.value == pytest.approx(4.0 * math.pi**2, rel=1e-7)
        assert mu0.tolerance > 0.0

    def test_three_dimensional_closed_form(self) -> None:
        """Test n=3, where phi = u / cos z gives mu_i = (i+1)^2 pi^2/D^2 - 1."""
        prob = ModelProblem.create(n=3, D=2.0, nodes=NODES)
        mu0, mu1 = solve_spectrum_dense(prob, 2)
        assert mu0.value == pytest.approx(math.pi**2 / 4.0 - 1.0, rel=1e-6)
        assert mu1.value == pytest.approx(math.pi**2 - 1.0, rel=1e-6)

    def test_parity_and_zero_count(self) -> None:
        """Test the ground state is even and single-signed; mode 1 is odd."""
        prob = ModelProblem.create(n=2, D=2.0, nodes=NODES)
        modes = dense_full_modes(prob, 2)
        assert count_sign_changes(modes[0][2]) == 0
        assert count_sign_changes(modes[1][2]) == 1
        pairs = solve_spectrum_dense(prob, 2)
        assert pairs[0].parity is Parity.EVEN
        assert pairs[1].parity is Parity.ODD

    def test_ground_state_positive(self) -> None:
        """Test samples > 0 on [0, D/2) and 0 at D/2."""
        prob = ModelProblem.create(n=2, D=2.0, nodes=NODES)
        ground = solve_spectrum_dense(prob, 1)[0]
        assert np.all(ground.samples[:-1] > 0)
        assert ground.samples[-1] == 0.0

    def test_sup_normalization(self) -> None:
        """Test sup-norm scaling."""
        prob = ModelProblem.create(n=2, D=2.0, nodes=NODES)
        ground = solve_spectrum_dense(prob, 1, Normalization.SUP_NORM)[0]
        assert np.max(np.abs(ground.samples)) == pytest.approx(1.0)

    def test_without_extrapolation(self) -> None:
        """Test the raw value carries no certified tolerance."""
        prob = ModelProblem.create(n=2, D=1.0, nodes=NODES)
        raw = solve_spectrum_dense(prob, 1, extrapolate=False)[0]
        assert raw.tolerance == 0.0

    def test_invalid_count(self) -> None:
        """Test count must be 1 or 2."""
        prob = ModelProblem.create(n=2, D=1.0, nodes=NODES)
        with pytest.raises(ValueError, match="count must be 1 or 2"):
            solve_spectrum_dense(prob, 3)


class TestShooting:
    """Test the shooting solver."""

    def test_agrees_with_dense_oracle(self) -> None:
        """Test shooting matches the dense oracle within 1e-6 relative."""
        prob = ModelProblem.create(n=3, D=2.0, nodes=NODES)
        dense = solve_spectrum_dense(prob, 2)
        for index in (0, 1):
            shot = solve_spectrum_shooting(prob, index)
            assert shot.value == pytest.approx(dense[index].value, rel=1e-6)
            assert shot.method == "shooting"

    def test_boundary_values(self) -> None:
        """Test phi(D/2) = 0, phi'(D/2) = -1 and phi'(0) = 0 for the ground state."""
        prob = ModelProblem.create(n=2, D=2.0, nodes=NODES)
        ground = solve_spectrum_shooting(prob, 0)
        assert abs(ground.samples[-1]) < 1e-8
        assert ground.dphi[-1] == pytest.approx(-1.0)
        assert abs(ground.dphi[0]) < 1e-12
        assert np.all(ground.samples[:-1] > 0)

    def test_odd_mode_starts_at_zero(self) -> None:
        """Test the odd launch has phi(0) = 0."""
        prob = ModelProblem.create(n=2, D=2.0, nodes=NODES)
        first = solve_spectrum_shooting(prob, 1)
        assert first.samples[0] == 0.0
        assert first.parity is Parity.ODD

    def test_log_derivative_scalar_and_array(self) -> None:
        """Test (log phi)' accepts scalars and arrays."""
        prob = ModelProblem.create(n=2, D=2.0, nodes=NODES)
        ground = solve_spectrum_shooting(prob, 0)
        assert ground.log_derivative(0.0)[0] == pytest.approx(0.0, abs=1e-12)
        values = ground.log_derivative(np.array([0.2, 0.5, 0.9]))
        assert values.shape == (3,)
        assert np.all(np.diff(values) < 0)

    def test_invalid_index(self) -> None:
        """Test only indices 0 and 1 are supported."""
        prob = ModelProblem.create(n=2, D=1.0, nodes=NODES)
        with pytest.raises(ValueError, match="index must be 0 or 1"):
            solve_spectrum_shooting(prob, 2)


class TestModelGap:
    """Test the gap against 3 pi^2 / D^2."""

    def test_flat_gap(self) -> None:
        """Test n=1 gives 3 pi^2 exactly and no asserted bound."""
        gap = model_gap(ModelProblem.create(n=1, D=1.0, nodes=NODES))
        assert gap.gap == pytest.approx(3.0 * math.pi**2, rel=1e-7)
        assert not gap.bound_asserted
        assert gap.passed

    def test_bound_for_n3(self) -> None:
        """Test mu1 - mu0 >= 3 pi^2/4 at n=3, D=2."""
        gap = model_gap(ModelProblem.create(n=3, D=2.0, nodes=NODES))
        assert gap.bound == pytest.approx(3.0 * math.pi**2 / 4.0)
        assert gap.margin >= -gap.tolerance
        assert gap.passed

    def test_bound_for_n5(self) -> None:
        """Test the bound holds with positive margin in higher dimension."""
        gap = model_gap(ModelProblem.create(n=5, D=1.5, nodes=NODES))
        assert gap.margin > 0
        assert gap.passed

    def test_to_dict(self) -> None:
        """Test the JSON summary keys."""
        data = model_gap(ModelProblem.create(n=3, D=1.0, nodes=NODES)).to_dict()
        assert data["boundAsserted"] is True
        assert set(data) >= {"mu0", "mu1", "gap", "bound3Pi2D2", "margin", "passed"}


class TestDenseDiagnostics:
    """Test the zero counts and rounding floor of the dense oracle."""

    def test_sign_changes_recorded(self) -> None:
        """Test mode i records i sign changes and reports them."""
        pairs = solve_spectrum_dense(ModelProblem.create(n=2, D=2.0, nodes=NODES), 2)
        assert [pair.sign_changes for pair in pairs] == [0, 1]
        assert pairs[1].to_dict()["signChanges"] == 1

    def test_shooting_omits_sign_changes(self) -> None:
        """Test shooting pairs carry no dense zero count."""
        shot = solve_spectrum_shooting(ModelProblem.create(n=2, D=2.0, nodes=NODES), 0)
        assert shot.sign_changes is None
        assert "signChanges" not in shot.to_dict()

    def test_rounding_floor_in_tolerance(self) -> None:
        """Test the certified tolerance covers the refined grid's rounding floor."""
        prob = ModelProblem.create(n=5, D=3.0, nodes=NODES)
        floor = dense_rounding(prob.with_grid(prob.grid.refined()))
        assert floor > dense_rounding(prob) > 0.0
        for pair in solve_spectrum_dense(prob, 2):
            assert pair.tolerance >= floor


class TestInterlacingBracket:
    """Test the shooting brackets built from mu_0 and mu_1."""

    def test_ground_bracket(self) -> None:
        """Test index 0 is bracketed by (0, mu_1)."""
        assert interlacing_bracket(0.002, 3.5, 0) == (0.0, 3.5)

    def test_first_bracket_excludes_neighbours(self) -> None:
        """Test the n=1 odd bracket holds 4 pi^2 but neither pi^2 nor 16 pi^2."""
        p2 = math.pi**2
        lo, hi = interlacing_bracket(p2, 4.0 * p2, 1)
        assert p2 < lo < 4.0 * p2 < hi < 16.0 * p2


class TestLargeDiameter:
    """Test graded grids near D = pi, where mu_0 is small."""

    @pytest.mark.parametrize(("n", "D"), [(4, 3.0), (5, 3.0), (5, math.pi - 0.1)])
    def test_dense_and_shooting_agree(self, n: int, D: float) -> None:
        """Test the shooting root lies within the dense certified tolerance."""
        prob = ModelProblem.create(n=n, D=D, nodes=1001)
        gap, dense, shots = model_gap_with_pairs(prob)
        for d, s in zip(dense, shots, strict=True):
            assert abs(s.value - d.value) <= d.tolerance
        assert 0.0 < gap.mu0 < gap.mu1
        assert gap.passed


@pytest.mark.slow
class TestModelGapSweep:
    """Test the gap bound over the dimension and diameter sweep."""

    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("D", [0.5, 1.0, 2.0, 3.0, math.pi - 0.1])
    def test_bound_holds(self, n: int, D: float) -> None:
        """Test mu_1 - mu_0 >= 3 pi^2 / D^2 within the certified tolerance."""
        gap = model_gap(ModelProblem.create(n=n, D=D, nodes=1001))
        assert gap.bound_asserted
        assert gap.margin >= -gap.tolerance

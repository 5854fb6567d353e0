"""Tests for gaplab model classes."""

import math
from typing import Any

import numpy as np
import pytest

from gaplab.exceptions import ConfigValidationError
from gaplab.models import (
    GapChainReport,
    ModelGap,
    RunConfig,
    RunManifest,
    ShiftSearch,
    TwoPointSample,
    Verdict,
)
from gaplab.models.config import DEFAULT_TOLERANCES


def _gap(n: int, margin: float, tolerance: float = 1e-9) -> ModelGap:
    bound = 3.0 * math.pi**2
    return ModelGap(
        n=n,
        D=1.0,
        mu0=1.0,
        mu1=1.0 + bound + margin,
        gap=bound + margin,
        bound=bound,
        margin=margin,
        tolerance=tolerance,
    )


class TestModelGap:
    """Test ModelGap verdict logic."""

    def test_bound_only_asserted_from_three(self) -> None:
        """Test n < 3 passes regardless of margin."""
        assert not _gap(2, -1.0).bound_asserted
        assert _gap(2, -1.0).passed
        assert _gap(3, -1.0).bound_asserted

    def test_margin_within_tolerance(self) -> None:
        """Test a margin of -tolerance still passes."""
        assert _gap(3, -1e-9).passed
        assert not _gap(3, -1e-6).passed

    def test_to_dict(self) -> None:
        """Test dictionary conversion."""
        data = _gap(3, 0.5).to_dict()
        assert data["n"] == 3
        assert data["bound3Pi2D2"] == pytest.approx(3.0 * math.pi**2)
        assert data["passed"] is True


class TestVerdict:
    """Test Verdict serialization."""

    def test_minimal(self) -> None:
        """Test location and constants are omitted when absent."""
        data = Verdict(name="x", passed=True, worst_margin=0.1, checked=3).to_dict()
        assert data == {
            "name": "x",
            "passed": True,
            "worstMargin": 0.1,
            "checked": 3,
            "message": "",
        }

    def test_full(self) -> None:
        """Test location and constants are included."""
        verdict = Verdict(
            name="barrier",
            passed=False,
            worst_margin=-0.5,
            checked=10,
            location=(0.25, 0.01),
            message="scheme-accuracy warning",
            constants={"L0": 2.0},
        )
        data = verdict.to_dict()
        assert data["location"] == {"z": 0.25, "t": 0.01}
        assert data["constants"] == {"L0": 2.0}


class TestBallModels:
    """Test TwoPointSample and GapChainReport."""

    def test_two_point_margin(self) -> None:
        """Test margin = rhs - lhs and the CSV row."""
        x = np.array([0.0, 0.0, 1.0])
        y = np.array([0.0, math.sin(0.5), math.cos(0.5)])
        sample = TwoPointSample(x=x, y=y, d=0.5, lhs=-1.0, rhs=-0.5)
        assert sample.margin == 0.5
        assert sample.row() == pytest.approx((math.cos(0.5), 0.5, -1.0, -0.5, 0.5))

    def test_gap_chain_passed(self) -> None:
        """Test all margins must exceed -tolerance."""
        report = GapChainReport(
            n=3,
            D=2.0,
            lambda0=8.0,
            lambda1=20.0,
            mu0=1.0,
            mu1=9.0,
            margins={"gapComparison": 4.0, "groundState": 7.0, "modelBound": -1e-10},
            tolerance=1e-8,
        )
        assert report.passed
        report.margins["modelBound"] = -1e-6
        assert not report.passed
        assert report.to_dict()["passed"] is False


class TestShiftSearch:
    """Test ShiftSearch."""

    def test_monotone(self) -> None:
        """Test monotone requires every spot check to pass."""
        search = ShiftSearch(k=2, s=1.5, evaluations=12, spot_checks=[(2.0, True)])
        assert search.monotone
        search.spot_checks.append((3.0, False))
        assert not search.monotone
        assert search.to_dict()["spotChecks"] == [[2.0, True], [3.0, False]]


class TestRunConfig:
    """Test RunConfig."""

    def test_defaults(self) -> None:
        """Test embedded defaults validate."""
        cfg = RunConfig().validate()
        assert cfg.n == 2
        assert cfg.D == 2.0
        assert cfg.k_list == (2,)
        assert cfg.seed == 42
        assert cfg.tolerance("flow") == 1e-6

    @pytest.mark.parametrize(
        ("changes", "match"),
        [
            ({"n": 0}, "n: must be >= 1"),
            ({"D": math.pi}, "D: diameter out of range"),
            ({"D": 0.0}, "D: diameter out of range"),
            ({"k_list": (0,)}, "kList"),
            ({"k_list": ()}, "kList"),
            ({"grid_nodes": 5}, "gridNodes"),
            ({"evolution_nodes": 5}, "evolutionNodes"),
            ({"t_end": 0.0}, "tEnd"),
            ({"s_floor": -1.0}, "sFloor"),
            ({"s_max": 0.1}, "sMax"),
            ({"eps_values": (1.0, -1.0)}, "epsValues"),
            ({"pairs": 0}, "pairs"),
            ({"sweep_n": (1,)}, "sweepN"),
            ({"sweep_D": (4.0,)}, "sweepD"),
            ({"mollify_eps": 0.0}, "mollifyEps"),
            ({"snapshot_times": (1.0, -0.5)}, "snapshotTimes"),
        ],
    )
    def test_validate(self, changes: dict[str, Any], match: str) -> None:
        """Test each invalid field is named in the error."""
        with pytest.raises(ConfigValidationError, match=match):
            RunConfig().override(**changes).validate()

    def test_invalid_tolerance(self) -> None:
        """Test unknown and non-positive tolerances."""
        with pytest.raises(ConfigValidationError, match="tolerances.bogus"):
            RunConfig(tolerances={"bogus": 1.0}).validate()
        with pytest.raises(ConfigValidationError, match="tolerances.flow"):
            RunConfig(tolerances={"flow": 0.0}).validate()

    def test_override_skips_none(self) -> None:
        """Test None leaves a field unchanged."""
        cfg = RunConfig().override(n=3, D=None)
        assert cfg.n == 3
        assert cfg.D == 2.0

    def test_from_dict(self) -> None:
        """Test camelCase keys and partial tolerances."""
        cfg = RunConfig.from_dict(
            {
                "n": 3,
                "D": 1.5,
                "kList": [1, 2, 4],
                "gridNodes": 801,
                "tolerances": {"flow": 1e-7},
                "useOracle": False,
                "mollifyEps": 0.05,
                "snapshotTimes": [0.5, 2],
            }
        )
        assert cfg.n == 3
        assert cfg.D == 1.5
        assert cfg.k_list == (1, 2, 4)
        assert cfg.grid_nodes == 801
        assert cfg.tolerance("flow") == 1e-7
        assert cfg.tolerance("twoPoint") == DEFAULT_TOLERANCES["twoPoint"]
        assert cfg.use_oracle is False
        assert cfg.mollify_eps == 0.05
        assert cfg.snapshot_times == (0.5, 2.0)

    def test_from_dict_unknown_key(self) -> None:
        """Test keys outside the schema are rejected."""
        with pytest.raises(ConfigValidationError, match="Unknown field"):
            RunConfig.from_dict({"n": 2, "diameter": 1.0})

    def test_from_dict_wrong_type(self) -> None:
        """Test type errors name the field path."""
        with pytest.raises(ConfigValidationError, match="config.D"):
            RunConfig.from_dict({"D": "two"})

    def test_from_dict_not_object(self) -> None:
        """Test the document must be an object."""
        with pytest.raises(ConfigValidationError, match="Expected dict"):
            RunConfig.from_dict([1, 2])  # type: ignore[arg-type]

    def test_to_dict_reloads(self) -> None:
        """Test to_dict output is accepted by from_dict."""
        cfg = RunConfig(n=3, D=1.0, k_list=(1, 3), mollify_eps=0.1)
        data = cfg.to_dict()
        assert data["kList"] == [1, 3]
        assert data["mollifyEps"] == 0.1
        reloaded = RunConfig.from_dict(dict(data))
        assert reloaded.to_dict() == data


class TestRunManifest:
    """Test RunManifest."""

    def test_passed_and_dict(self) -> None:
        """Test verdict aggregation and sorted maps."""
        manifest = RunManifest(
            version="0.1.0",
            command="eigen",
            created_at="2026-01-01T00:00:00+00:00",
            config=RunConfig(),
            verdicts={"eigen.oracle1": True, "eigen.oracle0": True},
            tolerances={"eigen.gap": 1e-9},
        )
        assert manifest.passed
        data = manifest.to_dict()
        assert list(data["verdicts"]) == ["eigen.oracle0", "eigen.oracle1"]
        assert "note" not in data

        manifest.verdicts["eigen.gapBound"] = False
        manifest.note = "geodesic balls only"
        data = manifest.to_dict()
        assert data["passed"] is False
        assert data["note"] == "geodesic balls only"

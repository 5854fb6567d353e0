"""
Run configuration and manifest model classes.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Any

from ..exceptions import ConfigValidationError
from ..types import ManifestDict, ManifestFileDict, RunConfigDict
from ..validation import (
    reject_unknown_keys,
    safe_get_optional_bool,
    safe_get_optional_dict,
    safe_get_optional_float,
    safe_get_optional_float_list,
    safe_get_optional_int,
    safe_get_optional_int_list,
    safe_get_optional_str,
    validate_json_document,
)

DEFAULT_TOLERANCES: dict[str, float] = {
    "flow": 1e-6,
    "twoPoint": 1e-6,
    "stepRtol": 1e-4,
    "stepAtol": 1e-8,
    "oracle": 1e-6,
}

DEFAULT_SWEEP_D = (0.5, 1.0, 2.0, 3.0, math.pi - 0.1)

_KEYS = {
    "n",
    "D",
    "kList",
    "gridNodes",
    "evolutionNodes",
    "tolerances",
    "tEnd",
    "seed",
    "outputDir",
    "sFloor",
    "sMax",
    "epsValues",
    "pairs",
    "sweepN",
    "sweepD",
    "mollifyEps",
    "useOracle",
    "snapshotTimes",
}


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one CLI invocation; defaults are embedded."""

    n: int = 2
    D: float = 2.0
    k_list: tuple[int, ...] = (2,)
    grid_nodes: int = 2001
    evolution_nodes: int = 1001
    tolerances: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_TOLERANCES)
    )
    t_end: float = 30.0
    seed: int = 42
    output_dir: str = "gaplab-output"
    s_floor: float = 0.5
    s_max: float = 50.0
    eps_values: tuple[float, ...] = (1.0, 0.25, 0.0625)
    pairs: int = 2000
    sweep_n: tuple[int, ...] = (2, 3, 5)
    sweep_D: tuple[float, ...] = DEFAULT_SWEEP_D
    mollify_eps: float | None = None
    use_oracle: bool = True
    snapshot_times: tuple[float, ...] = (0.1, 1.0, 10.0)

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def validate(self) -> "RunConfig":
        """
        Check every field against the preconditions of the pipelines.

        Raises:
            ConfigValidationError: Naming the first offending field
        """
        if self.n < 1:
            raise ConfigValidationError(f"n: must be >= 1, got {self.n}")
        if not 0.0 < self.D < math.pi:
            raise ConfigValidationError(
                f"D: diameter out of range: D={self.D} must lie in (0, pi)"
            )
        if not self.k_list or any(k < 1 for k in self.k_list):
            raise ConfigValidationError(f"kList: entries must be >= 1, got {list(self.k_list)}")
        if self.grid_nodes < 10:
            raise ConfigValidationError(f"gridNodes: must be >= 10, got {self.grid_nodes}")
        if self.evolution_nodes < 10:
            raise ConfigValidationError(
                f"evolutionNodes: must be >= 10, got {self.evolution_nodes}"
            )
        for name, value in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigValidationError(f"tolerances.{name}: unknown tolerance")
            if not value > 0:
                raise ConfigValidationError(f"tolerances.{name}: must be positive")
        if not self.t_end > 0:
            raise ConfigValidationError(f"tEnd: must be positive, got {self.t_end}")
        if self.s_floor < 0:
            raise ConfigValidationError(f"sFloor: must be >= 0, got {self.s_floor}")
        if not self.s_max > self.s_floor:
            raise ConfigValidationError("sMax: must exceed sFloor")
        if not self.eps_values or any(not e > 0 for e in self.eps_values):
            raise ConfigValidationError("epsValues: entries must be positive")
        if self.pairs < 1:
            raise ConfigValidationError(f"pairs: must be >= 1, got {self.pairs}")
        if any(n < 2 for n in self.sweep_n):
            raise ConfigValidationError("sweepN: ball dimensions must be >= 2")
        if any(not 0.0 < d < math.pi for d in self.sweep_D):
            raise ConfigValidationError("sweepD: diameter out of range (0, pi)")
        if self.mollify_eps is not None and not self.mollify_eps > 0:
            raise ConfigValidationError("mollifyEps: must be positive")
        if any(not t >= 0 for t in self.snapshot_times):
            raise ConfigValidationError("snapshotTimes: entries must be non-negative")
        return self

    def override(self, **changes: Any) -> "RunConfig":
        """Copy with the non-None entries of ``changes`` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, data: RunConfigDict | dict[str, Any]) -> "RunConfig":
        """Create RunConfig from a JSON document, keeping defaults for absent keys."""
        doc = validate_json_document(data)
        reject_unknown_keys(doc, _KEYS)
        base = cls()
        tolerances = dict(DEFAULT_TOLERANCES)
        given = safe_get_optional_dict(doc, "tolerances", "config")
        if given is not None:
            for name in given:
                value = safe_get_optional_float(given, name, "config.tolerances")
                if value is not None:
                    tolerances[name] = value

        def ints(key: str) -> tuple[int, ...] | None:
            values = safe_get_optional_int_list(doc, key, "config")
            return None if values is None else tuple(values)

        def floats(key: str) -> tuple[float, ...] | None:
            values = safe_get_optional_float_list(doc, key, "config")
            return None if values is None else tuple(values)

        config = base.override(
            n=safe_get_optional_int(doc, "n", "config"),
            D=safe_get_optional_float(doc, "D", "config"),
            k_list=ints("kList"),
            grid_nodes=safe_get_optional_int(doc, "gridNodes", "config"),
            evolution_nodes=safe_get_optional_int(doc, "evolutionNodes", "config"),
            t_end=safe_get_optional_float(doc, "tEnd", "config"),
            seed=safe_get_optional_int(doc, "seed", "config"),
            output_dir=safe_get_optional_str(doc, "outputDir", "config"),
            s_floor=safe_get_optional_float(doc, "sFloor", "config"),
            s_max=safe_get_optional_float(doc, "sMax", "config"),
            eps_values=floats("epsValues"),
            pairs=safe_get_optional_int(doc, "pairs", "config"),
            sweep_n=ints("sweepN"),
            sweep_D=floats("sweepD"),
            mollify_eps=safe_get_optional_float(doc, "mollifyEps", "config"),
            use_oracle=safe_get_optional_bool(doc, "useOracle", "config"),
            snapshot_times=floats("snapshotTimes"),
        )
        return replace(config, tolerances=tolerances)

    def to_dict(self) -> RunConfigDict:
        """Convert RunConfig instance to its JSON document."""
        return {
            "n": self.n,
            "D": self.D,
            "kList": list(self.k_list),
            "gridNodes": self.grid_nodes,
            "evolutionNodes": self.evolution_nodes,
            "tolerances": {
                "flow": self.tolerance("flow"),
                "twoPoint": self.tolerance("twoPoint"),
                "stepRtol": self.tolerance("stepRtol"),
                "stepAtol": self.tolerance("stepAtol"),
                "oracle": self.tolerance("oracle"),
            },
            "tEnd": self.t_end,
            "seed": self.seed,
            "outputDir": self.output_dir,
            "sFloor": self.s_floor,
            "sMax": self.s_max,
            "epsValues": list(self.eps_values),
            "pairs": self.pairs,
            "sweepN": list(self.sweep_n),
            "sweepD": list(self.sweep_D),
            "mollifyEps": self.mollify_eps,
            "useOracle": self.use_oracle,
            "snapshotTimes": list(self.snapshot_times),
        }


@dataclass
class RunManifest:
    """Record of one run: config, verdicts, tolerances and file checksums."""

    version: str
    command: str
    created_at: str
    config: RunConfig
    verdicts: dict[str, bool] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    files: list[ManifestFileDict] = field(default_factory=list)
    note: str | None = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> ManifestDict:
        """Convert RunManifest instance to dictionary."""
        result: ManifestDict = {
            "version": self.version,
            "command": self.command,
            "createdAt": self.created_at,
            "config": self.config.to_dict(),
            "verdicts": dict(sorted(self.verdicts.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
            "files": list(self.files),
            "passed": self.passed,
        }
        if self.note is not None:
            result["note"] = self.note
        return result

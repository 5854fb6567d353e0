"""
TypedDict definitions for gaplab JSON documents.

These describe the run configuration read from disk and the manifest written
next to every result set.
"""

from typing import TypedDict

from typing_extensions import NotRequired, Required


class TolerancesDict(TypedDict, total=False):
    """Type definition for the tolerance map of a run configuration."""

    flow: float
    twoPoint: float
    stepRtol: float
    stepAtol: float
    oracle: float


class RunConfigDict(TypedDict, total=False):
    """Type definition for a JSON run configuration; every field is optional."""

    n: int
    D: float
    kList: list[int]
    gridNodes: int
    evolutionNodes: int
    tolerances: TolerancesDict
    tEnd: float
    seed: int
    outputDir: str
    sFloor: float
    sMax: float
    epsValues: list[float]
    pairs: int
    sweepN: list[int]
    sweepD: list[float]
    mollifyEps: float | None
    useOracle: bool
    snapshotTimes: list[float]


class ManifestFileDict(TypedDict):
    """Type definition for one manifest file entry."""

    path: Required[str]
    sha256: Required[str]
    bytes: Required[int]


class ManifestDict(TypedDict):
    """Type definition for manifest.json."""

    version: Required[str]
    command: Required[str]
    createdAt: Required[str]
    config: Required[RunConfigDict]
    verdicts: Required[dict[str, bool]]
    tolerances: Required[dict[str, float]]
    files: Required[list[ManifestFileDict]]
    passed: Required[bool]
    note: NotRequired[str]

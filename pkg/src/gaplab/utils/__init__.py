"""Utility functions for gaplab result files."""

import csv
import hashlib
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from ..exceptions import ConfigValidationError


def sha256_file(path: Path) -> str:
    """
    SHA-256 hex digest of a file's contents.

    Args:
        path: File to hash

    Returns:
        Hex digest string
    """
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def canonical_json(data: Any) -> str:
    """JSON text with sorted keys and two-space indent, newline-terminated."""
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path: Path, data: Any) -> Path:
    """Write ``data`` as canonical JSON, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(data), encoding="utf-8")
    return path


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    """
    Write a UTF-8 CSV with a header row.

    Floats are written with repr precision so reruns are byte-identical.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return path


def load_json_file(path: Path) -> Any:
    """
    Load a JSON document from disk.

    Raises:
        ConfigValidationError: If the file is unreadable or not valid JSON
    """
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigValidationError(f"Cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"Invalid JSON in {path}: {e}") from e


def format_value(value: float) -> str:
    """Compact parameter label for file names, e.g. 2.0 -> '2'."""
    return f"{value:.6g}"

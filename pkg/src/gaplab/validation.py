"""
Validation utilities for JSON run configurations.

Each getter checks one field and reports failures with the dotted path of the
offending field, so a bad config names exactly what to fix.
"""

import logging
import math
from typing import Any

from .exceptions import ConfigValidationError

logger = logging.getLogger(__name__)


def _path(field_path: str, key: str) -> str:
    return f"{field_path}.{key}" if field_path else key


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def safe_get_float(data: dict[str, Any], key: str, field_path: str = "") -> float:
    """
    Safely extract a finite number from dict with runtime validation.

    Args:
        data: Dictionary to extract from
        key: Key to extract
        field_path: Path for error reporting

    Returns:
        Float value

    Raises:
        ConfigValidationError: If value is missing, not a number or not finite
    """
    full_path = _path(field_path, key)

    if key not in data:
        raise ConfigValidationError(f"Missing required field: {full_path}")

    value = data[key]
    if not _is_number(value):
        raise ConfigValidationError(
            f"Expected number for {full_path}, got {type(value).__name__}"
        )
    if not math.isfinite(value):
        raise ConfigValidationError(f"Expected finite number for {full_path}")

    return float(value)


def safe_get_optional_float(
    data: dict[str, Any], key: str, field_path: str = ""
) -> float | None:
    """
    Safely extract an optional finite number from dict.

    Returns:
        Float value or None when the key is absent or null

    Raises:
        ConfigValidationError: If value exists but is not a finite number
    """
    if data.get(key) is None:
        return None
    return safe_get_float(data, key, field_path)


def safe_get_int(data: dict[str, Any], key: str, field_path: str = "") -> int:
    """
    Safely extract an integer from dict with runtime validation.

    Booleans are rejected even though Python treats them as integers.

    Raises:
        ConfigValidationError: If value is missing or not an integer
    """
    full_path = _path(field_path, key)

    if key not in data:
        raise ConfigValidationError(f"Missing required field: {full_path}")

    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigValidationError(
            f"Expected int for {full_path}, got {type(value).__name__}"
        )

    return value


def safe_get_optional_int(
    data: dict[str, Any], key: str, field_path: str = ""
) -> int | None:
    if data.get(key) is None:
        return None
    return safe_get_int(data, key, field_path)


def safe_get_optional_str(
    data: dict[str, Any], key: str, field_path: str = ""
) -> str | None:
    """
    Safely extract optional string from dict.

    Raises:
        ConfigValidationError: If value exists but is not a string
    """
    full_path = _path(field_path, key)
    value = data.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise ConfigValidationError(
            f"Expected str or None for {full_path}, got {type(value).__name__}"
        )
    return value


def safe_get_optional_bool(
    data: dict[str, Any], key: str, field_path: str = ""
) -> bool | None:
    full_path = _path(field_path, key)
    value = data.get(key)
    if value is None:
        return None
    if not isinstance(value, bool):
        raise ConfigValidationError(
            f"Expected bool for {full_path}, got {type(value).__name__}"
        )
    return value


def safe_get_optional_int_list(
    data: dict[str, Any], key: str, field_path: str = ""
) -> list[int] | None:
    """
    Safely extract an optional list of integers.

    Raises:
        ConfigValidationError: If value is not a list or holds a non-integer;
            the message names the offending index
    """
    full_path = _path(field_path, key)
    value = data.get(key)
    if value is None:
        return None
    if not isinstance(value, list):
        raise ConfigValidationError(
            f"Expected list for {full_path}, got {type(value).__name__}"
        )
    for i, item in enumerate(value):
        if not isinstance(item, int) or isinstance(item, bool):
            raise ConfigValidationError(
                f"Expected int for {full_path}[{i}], got {type(item).__name__}"
            )
    return list(value)


def safe_get_optional_float_list(
    data: dict[str, Any], key: str, field_path: str = ""
) -> list[float] | None:
    """
    Safely extract an optional list of finite numbers.

    Raises:
        ConfigValidationError: If value is not a list of finite numbers
    """
    full_path = _path(field_path, key)
    value = data.get(key)
    if value is None:
        return None
    if not isinstance(value, list):
        raise ConfigValidationError(
            f"Expected list for {full_path}, got {type(value).__name__}"
        )
    for i, item in enumerate(value):
        if not _is_number(item) or not math.isfinite(item):
            raise ConfigValidationError(
                f"Expected finite number for {full_path}[{i}], "
                f"got {type(item).__name__}"
            )
    return [float(item) for item in value]


def safe_get_optional_dict(
    data: dict[str, Any], key: str, field_path: str = ""
) -> dict[str, Any] | None:
    full_path = _path(field_path, key)
    value = data.get(key)
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ConfigValidationError(
            f"Expected dict for {full_path}, got {type(value).__name__}"
        )
    return value


def validate_json_document(data: Any, field_path: str = "config") -> dict[str, Any]:
    """
    Validate that a parsed JSON document is an object.

    Raises:
        ConfigValidationError: If the document is not a dictionary
    """
    if not isinstance(data, dict):
        raise ConfigValidationError(
            f"Expected dict for {field_path}, got {type(data).__name__}"
        )
    return data


def reject_unknown_keys(
    data: dict[str, Any], allowed: set[str], field_path: str = "config"
) -> None:
    """
    Raise on keys outside the schema.

    Raises:
        ConfigValidationError: Naming every unknown field
    """
    unknown = sorted(set(data) - allowed)
    if unknown:
        names = ", ".join(_path(field_path, key) for key in unknown)
        raise ConfigValidationError(f"Unknown field(s): {names}")

"""
Tests for validation utilities.

These tests cover the runtime validation functions used when reading JSON
run configurations.
"""

from typing import Any

import pytest

from gaplab.exceptions import ConfigValidationError
from gaplab.validation import (
    reject_unknown_keys,
    safe_get_float,
    safe_get_int,
    safe_get_optional_bool,
    safe_get_optional_dict,
    safe_get_optional_float,
    safe_get_optional_float_list,
    safe_get_optional_int,
    safe_get_optional_int_list,
    safe_get_optional_str,
    validate_json_document,
)


class TestSafeGetFloat:
    """Test safe_get_float function."""

    def test_safe_get_float_success(self) -> None:
        """Test successful number extraction."""
        assert safe_get_float({"D": 2.5}, "D") == 2.5

    def test_safe_get_float_accepts_int(self) -> None:
        """Test integers are widened to float."""
        result = safe_get_float({"D": 2}, "D")
        assert result == 2.0
        assert isinstance(result, float)

    def test_safe_get_float_missing_key_with_path(self) -> None:
        """Test missing key reports the dotted path."""
        data: dict[str, Any] = {}
        with pytest.raises(
            ConfigValidationError, match="Missing required field: config.D"
        ):
            safe_get_float(data, "D", "config")

    def test_safe_get_float_wrong_type(self) -> None:
        """Test string value is rejected."""
        with pytest.raises(
            ConfigValidationError, match="Expected number for D, got str"
        ):
            safe_get_float({"D": "2"}, "D")

    def test_safe_get_float_rejects_bool(self) -> None:
        """Test booleans are not numbers here."""
        with pytest.raises(ConfigValidationError, match="got bool"):
            safe_get_float({"D": True}, "D")

    def test_safe_get_float_rejects_nan(self) -> None:
        """Test non-finite numbers are rejected."""
        with pytest.raises(ConfigValidationError, match="finite"):
            safe_get_float({"D": float("nan")}, "D")


class TestSafeGetInt:
    """Test safe_get_int function."""

    def test_safe_get_int_success(self) -> None:
        """Test successful integer extraction."""
        assert safe_get_int({"n": 3}, "n") == 3

    def test_safe_get_int_rejects_float(self) -> None:
        """Test float value is rejected."""
        with pytest.raises(
            ConfigValidationError, match="Expected int for config.n, got float"
        ):
            safe_get_int({"n": 3.0}, "n", "config")

    def test_safe_get_int_rejects_bool(self) -> None:
        """Test booleans are rejected."""
        with pytest.raises(ConfigValidationError, match="got bool"):
            safe_get_int({"n": False}, "n")


class TestOptionalGetters:
    """Test the optional getters."""

    def test_absent_and_null_give_none(self) -> None:
        """Test absent and null values map to None."""
        data: dict[str, Any] = {"a": None}
        assert safe_get_optional_float(data, "a") is None
        assert safe_get_optional_float(data, "b") is None
        assert safe_get_optional_int(data, "a") is None
        assert safe_get_optional_str(data, "a") is None
        assert safe_get_optional_bool(data, "a") is None
        assert safe_get_optional_dict(data, "a") is None
        assert safe_get_optional_int_list(data, "a") is None
        assert safe_get_optional_float_list(data, "a") is None

    def test_optional_str_wrong_type(self) -> None:
        """Test optional string with wrong type."""
        with pytest.raises(
            ConfigValidationError, match="Expected str or None for outputDir, got int"
        ):
            safe_get_optional_str({"outputDir": 1}, "outputDir")

    def test_optional_bool(self) -> None:
        """Test optional bool extraction and rejection of ints."""
        assert safe_get_optional_bool({"useOracle": False}, "useOracle") is False
        with pytest.raises(ConfigValidationError, match="Expected bool"):
            safe_get_optional_bool({"useOracle": 0}, "useOracle")

    def test_optional_dict_wrong_type(self) -> None:
        """Test optional dict with wrong type."""
        with pytest.raises(ConfigValidationError, match="Expected dict for tolerances"):
            safe_get_optional_dict({"tolerances": [1]}, "tolerances")


class TestListGetters:
    """Test list extraction."""

    def test_int_list_success(self) -> None:
        """Test integer list extraction."""
        assert safe_get_optional_int_list({"kList": [1, 2, 3]}, "kList") == [1, 2, 3]

    def test_int_list_names_offending_index(self) -> None:
        """Test the message names the bad element."""
        with pytest.raises(
            ConfigValidationError, match=r"Expected int for config.kList\[1\], got str"
        ):
            safe_get_optional_int_list({"kList": [1, "2"]}, "kList", "config")

    def test_int_list_not_a_list(self) -> None:
        """Test a scalar where a list is expected."""
        with pytest.raises(ConfigValidationError, match="Expected list for kList"):
            safe_get_optional_int_list({"kList": 2}, "kList")

    def test_float_list_success(self) -> None:
        """Test number list extraction widens ints."""
        assert safe_get_optional_float_list({"sweepD": [1, 2.5]}, "sweepD") == [
            1.0,
            2.5,
        ]

    def test_float_list_rejects_infinity(self) -> None:
        """Test infinite entries are rejected."""
        with pytest.raises(ConfigValidationError, match=r"sweepD\[0\]"):
            safe_get_optional_float_list({"sweepD": [float("inf")]}, "sweepD")


class TestDocumentChecks:
    """Test document-level validation."""

    def test_validate_json_document_success(self) -> None:
        """Test a dict passes through unchanged."""
        data = {"n": 2}
        assert validate_json_document(data) is data

    def test_validate_json_document_rejects_list(self) -> None:
        """Test a non-object document is rejected."""
        with pytest.raises(
            ConfigValidationError, match="Expected dict for config, got list"
        ):
            validate_json_document([1, 2])

    def test_reject_unknown_keys(self) -> None:
        """Test every unknown key is named."""
        with pytest.raises(
            ConfigValidationError, match="Unknown field.*config.bar, config.foo"
        ):
            reject_unknown_keys({"n": 2, "foo": 1, "bar": 2}, {"n"})

    def test_reject_unknown_keys_accepts_known(self) -> None:
        """Test known keys pass."""
        reject_unknown_keys({"n": 2}, {"n", "D"})

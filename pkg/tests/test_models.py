"""Tests for the data models and JSON helpers."""

import pytest
import numpy as np
from pathlib import Path
import sys

from pydantic import ValidationError

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from core.models import (
    CheckResult,
    HighestWeights,
    ModularElement,
    ParameterOverrides,
    QkzbConfig,
    Report,
    SuiteConfig,
    to_complex,
)
from utils.io import format_complex, load_json, save_json, to_jsonable


class TestComplexParsing:
    """Test the complex-number field type."""

    def test_accepted_forms(self):
        """Test pairs, strings and reals."""
        assert to_complex([0.5, -1.0]) == 0.5 - 1j
        assert to_complex("0.1-0.2i") == 0.1 - 0.2j
        assert to_complex("0.1-0.2j") == 0.1 - 0.2j
        assert to_complex(3) == 3 + 0j

    def test_rejects_garbage(self):
        """Test uninterpretable values raise."""
        with pytest.raises(ValueError):
            to_complex({"re": 1})

    def test_overrides_parse_pairs(self):
        """Test config parameters accept [re, im] pairs."""
        overrides = ParameterOverrides(tau=[0.0, 0.9], zs=[[0.1, 0.0], "0.2+0.1i"])
        assert overrides.tau == 0.9j
        assert overrides.zs == (0.1 + 0j, 0.2 + 0.1j)


class TestHighestWeights:
    """Test the highest-weight model."""

    def test_properties(self):
        """Test n, m and integrality."""
        weights = HighestWeights(lambdas=(2, 1, 1))
        assert weights.n == 3
        assert weights.m == 2
        assert weights.is_integer
        assert weights.reversed().lambdas == (1.0, 1.0, 2.0)

    def test_odd_sum_rejected(self):
        """Test the weights must sum to an even integer."""
        with pytest.raises(ValidationError):
            HighestWeights(lambdas=(1, 2))

    def test_config_needs_one_point_per_weight(self):
        """Test marked points and weights must match."""
        with pytest.raises(ValidationError):
            QkzbConfig(zs=(0.1,), tau=0.9j, p=0.7j, eta=0.1, weights=HighestWeights(lambdas=(1, 1)))

    def test_config_shift(self):
        """Test moving one marked point."""
        config = QkzbConfig(zs=(0.1, 0.2), tau=0.9j, p=0.7j, eta=0.1, weights=HighestWeights(lambdas=(1, 1)))
        moved = config.shifted(1, 0.7j)
        assert moved.zs == (0.1 + 0j, 0.2 + 0.7j)
        assert config.zs == (0.1 + 0j, 0.2 + 0j)


class TestModularElement:
    """Test SL(2, Z) elements."""

    def test_determinant_enforced(self):
        """Test det != 1 is refused."""
        with pytest.raises(ValidationError):
            ModularElement(a=1, b=1, c=1, d=1)

    def test_product_and_action(self):
        """Test S^2 = -1 and the Moebius action."""
        S = ModularElement(a=0, b=-1, c=1, d=0)
        square = S @ S
        assert (square.a, square.b, square.c, square.d) == (-1, 0, 0, -1)
        assert square.act(0.3 + 0.9j) == pytest.approx(0.3 + 0.9j)
        assert S.act(1j) == pytest.approx(1j)
        assert S.automorphy(0.9j) == 0.9j


class TestReport:
    """Test the report model."""

    def _report(self, residual=1e-12):
        return Report(
            suite="special",
            seed=7,
            parameters={"tau": [0.0, 0.9]},
            checks=[CheckResult(name="theta-shifts", residual=residual, tolerance=1e-10, passed=residual < 1e-10)],
        )

    def test_schema_alias(self):
        """Test the JSON form carries the schema version and status."""
        data = self._report().to_json_dict()
        assert data["schema"] == 1
        assert data["status"] == "pass"
        assert "schema_version" not in data

    def test_fingerprint_ignores_timestamp(self):
        """Test identical payloads hash identically."""
        first, second = self._report(), self._report()
        second.timestamp = second.timestamp.replace(year=2001)
        assert first.fingerprint() == second.fingerprint()
        assert first.fingerprint() != self._report(residual=2e-12).fingerprint()

    def test_failed_status(self):
        """Test a failed check fails the report."""
        report = self._report(residual=1.0)
        assert not report.passed
        assert report.status == "fail"


class TestSuiteConfig:
    """Test suite configuration parsing."""

    def test_unknown_key_rejected(self):
        """Test unknown top-level keys are refused."""
        with pytest.raises(ValidationError):
            SuiteConfig.model_validate({"suite": "special", "colour": "red"})

    def test_unknown_parameter_rejected(self):
        """Test unknown parameter keys are refused."""
        with pytest.raises(ValidationError):
            SuiteConfig.model_validate({"suite": "special", "parameters": {"omega": 1}})

    def test_defaults(self):
        """Test an empty config is valid."""
        config = SuiteConfig(suite="gauss-sums")
        assert config.seed is None
        assert config.parameters.tau is None
        assert config.tolerances == {}


class TestJsonHelpers:
    """Test JSON conversion helpers."""

    def test_to_jsonable(self):
        """Test complex and numpy values are converted recursively."""
        value = to_jsonable({"a": 1 + 2j, "b": (np.float64(0.5), np.int64(3)), "c": np.array([1.0, 2.0]), 4: "x"})
        assert value == {"a": [1.0, 2.0], "b": [0.5, 3], "c": [1.0, 2.0], "4": "x"}

    def test_format_complex(self):
        """Test the printed form."""
        assert format_complex(2 - 2j) == "2-2i"
        assert format_complex(0j) == "0+0i"
        assert format_complex(complex(0.5, -0.0)) == "0.5+0i"

    def test_save_and_load(self, tmp_path):
        """Test complex values are written as pairs."""
        path = tmp_path / "nested" / "values.json"
        save_json({"z": 1 - 1j}, path)
        assert load_json(path) == {"z": [1.0, -1.0]}

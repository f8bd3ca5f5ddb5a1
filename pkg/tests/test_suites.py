"""Tests for the suite runner, the registry and the CLI."""

import json
import pytest
from pathlib import Path
import sys

from click.testing import CliRunner

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from config import settings
from core.exceptions import ConfigError, DomainError
from core.models import SuiteConfig
from main import cli
from pipelines import SUITES, get_suite
from pipelines.base import BaseSuite
from pipelines.special_suite import GaussSumSuite


class ToySuite(BaseSuite):
    """Two checks, one of which raises."""

    tolerances = {"small": 1e-3}
    defaults = {"N": 2, "tau": 0.9j}

    def __init__(self, config=None):
        super().__init__(name="toy", config=config)

    def execute(self):
        self.check("small", lambda: 1e-6)
        self.check("raises", self._fail)
        self.note("draw", self.generic(0.3))

    @staticmethod
    def _fail():
        raise DomainError("out of range")


class BrokenSuite(BaseSuite):
    """A bracketed check, a non-toolkit error inside a check, then an error outside any check."""

    tolerances = {"dybe[1,1,1]": 1e-3}

    def __init__(self, config=None):
        super().__init__(name="broken", config=config)

    def execute(self):
        self.check("dybe[1,1,1]", lambda: 1e-6)
        self.check("fused[2,1]", lambda: [0.0][1])
        raise RuntimeError("lost the grid")


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def restore_tolerance_scale(mocker):
    mocker.patch.object(settings, "tolerance_scale", 1.0)


def last_json_line(output: str) -> dict:
    return json.loads(output.strip().splitlines()[-1])


class TestBaseSuite:
    """Test the suite runner."""

    def test_errors_become_failed_checks(self, tmp_path):
        """Test a toolkit error is recorded as a failed check with its message."""
        report = ToySuite().run(tmp_path / "toy.json")
        small, raises = report.checks
        assert small.passed and small.residual == pytest.approx(1e-6)
        assert not raises.passed
        assert raises.residual is None
        assert "out of range" in raises.note
        assert report.status == "fail"
        assert json.loads((tmp_path / "toy.json").read_text())["schema"] == 1

    def test_unexpected_errors_keep_the_report(self, tmp_path):
        """Test non-toolkit errors are recorded and earlier checks survive in the report."""
        report = BrokenSuite(SuiteConfig(suite="broken")).run(tmp_path / "broken.json")
        names = [check.name for check in report.checks]
        assert names == ["dybe[1,1,1]", "fused[2,1]", "suite-aborted"]
        assert report.checks[0].passed
        assert "IndexError" in report.checks[1].note
        assert "RuntimeError" in report.checks[2].note
        saved = json.loads((tmp_path / "broken.json").read_text())
        assert saved["status"] == "fail"
        assert len(saved["checks"]) == 3

    def test_overrides_merge_with_defaults(self):
        """Test config parameters override the suite defaults."""
        suite = ToySuite(SuiteConfig(suite="toy", parameters={"N": 7}))
        assert suite.parameters["N"] == 7
        assert suite.parameters["tau"] == 0.9j

    def test_tolerances(self, mocker):
        """Test config tolerances and the global scale."""
        mocker.patch.object(settings, "tolerance_scale", 10.0)
        suite = ToySuite(SuiteConfig(suite="toy", tolerances={"raises": 0.5}))
        assert suite.tolerance("small") == pytest.approx(1e-2)
        assert suite.tolerance("raises") == pytest.approx(5.0)
        assert suite.tolerance("unlisted") == pytest.approx(1e-7)

    def test_seeded_draws_repeat(self):
        """Test identical seeds give identical draws."""
        first = ToySuite(SuiteConfig(suite="toy", seed=11)).generic(0.3, 4)
        second = ToySuite(SuiteConfig(suite="toy", seed=11)).generic(0.3, 4)
        assert list(first) == list(second)

    def test_quadrature_overrides_are_restored(self, tmp_path):
        """Test quadrature overrides only apply during the run."""
        before = settings.quad_nodes
        config = SuiteConfig(suite="toy", quadrature={"quad_nodes": 12, "orientation": "mirrored"})
        suite = ToySuite(config)
        assert suite.provenance["contour_orientation"] == "mirrored"
        suite.run(tmp_path / "toy.json")
        assert settings.quad_nodes == before


class TestRegistry:
    """Test the suite registry."""

    def test_names(self):
        """Test every suite registers under its own name."""
        for name, suite_cls in SUITES.items():
            assert suite_cls().name == name

    def test_unknown_suite(self):
        """Test unknown names raise ConfigError."""
        with pytest.raises(ConfigError):
            get_suite("nope")

    def test_config_mismatch(self):
        """Test the config must name the requested suite."""
        with pytest.raises(ConfigError):
            get_suite("special", SuiteConfig(suite="heat"))

    def test_gauss_suite_passes(self, tmp_path):
        """Test the Gauss-sum suite on a short range."""
        report = GaussSumSuite(SuiteConfig(suite="gauss-sums", parameters={"N": 12})).run(tmp_path / "g.json")
        assert len(report.checks) == 12
        assert report.passed


class TestCLI:
    """Test the command-line interface."""

    def test_list(self, runner):
        """Test every suite is listed."""
        result = runner.invoke(cli, ["list"])
        assert result.exit_code == 0
        assert "gauss-sums" in result.output
        assert "semiclassical" in result.output

    def test_verify_unknown_suite(self, runner):
        """Test unknown suites exit with 2."""
        result = runner.invoke(cli, ["verify", "nope"])
        assert result.exit_code == 2

    def test_verify_invalid_config(self, runner, tmp_path):
        """Test invalid configs exit with 2."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"suite": "gauss-sums", "colour": "red"}))
        result = runner.invoke(cli, ["verify", "gauss-sums", "--config", str(path)])
        assert result.exit_code == 2

    def test_verify_passes(self, runner, tmp_path):
        """Test a passing run exits with 0 and writes the report."""
        config = tmp_path / "gauss.json"
        config.write_text(json.dumps({"suite": "gauss-sums", "parameters": {"N": 5}}))
        out = tmp_path / "report.json"
        result = runner.invoke(cli, ["verify", "gauss-sums", "--config", str(config), "--out", str(out), "--seed", "3"])
        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert report["status"] == "pass"
        assert report["seed"] == 3
        assert len(report["checks"]) == 5

    def test_verify_failure_exit_code(self, runner, tmp_path):
        """Test a failing run exits with 1."""
        config = tmp_path / "gauss.json"
        config.write_text(json.dumps({"suite": "gauss-sums", "parameters": {"N": 3}}))
        result = runner.invoke(cli, ["verify", "gauss-sums", "--config", str(config),
                                     "--out", str(tmp_path / "r.json"), "--tolerance-scale", "0"])
        assert result.exit_code == 1

    def test_verify_shows_bracketed_names(self, runner, tmp_path, mocker):
        """Test check names with brackets are printed literally, not read as markup."""
        mocker.patch.dict(SUITES, {"broken": BrokenSuite})
        result = runner.invoke(cli, ["verify", "broken", "--out", str(tmp_path / "b.json")])
        assert result.exit_code == 1
        assert "dybe[1,1,1]" in result.output
        assert "fused[2,1]" in result.output

    def test_eval_gauss(self, runner):
        """Test S(4) = 2 - 2i."""
        result = runner.invoke(cli, ["eval", "gauss", "N=4"])
        assert result.exit_code == 0
        re, im = last_json_line(result.output)["value"]
        assert re == pytest.approx(2.0) and im == pytest.approx(-2.0)

    def test_eval_theta_at_zero(self, runner):
        """Test theta(0) = 0."""
        result = runner.invoke(cli, ["eval", "theta", "t=0"])
        assert result.exit_code == 0
        re, im = last_json_line(result.output)["value"]
        assert abs(re) < 1e-13 and abs(im) < 1e-13

    def test_eval_omega_at_zero(self, runner):
        """Test Omega_0 = 1."""
        result = runner.invoke(cli, ["eval", "omega", "a=0", "z=0.1+0.05i"])
        assert result.exit_code == 0
        re, im = last_json_line(result.output)["value"]
        assert re == pytest.approx(1.0) and abs(im) < 1e-14

    def test_eval_missing_argument(self, runner):
        """Test missing arguments exit with 2."""
        result = runner.invoke(cli, ["eval", "Q", "k=1"])
        assert result.exit_code == 2

    def test_eval_malformed_argument(self, runner):
        """Test arguments without '=' exit with 2."""
        result = runner.invoke(cli, ["eval", "theta", "t"])
        assert result.exit_code == 2

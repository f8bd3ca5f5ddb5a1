"""Base suite class."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional
import logging
from datetime import datetime

import numpy as np

from config import settings
from core.exceptions import QkzbError
from core.models import CheckResult, ParameterOverrides, Report, SuiteConfig
from utils.io import save_json, to_jsonable

logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO))
logger = logging.getLogger(__name__)


class BaseSuite(ABC):
    """Base class for all verification suites."""

    # default tolerances per check name; config entries override them
    tolerances: Dict[str, float] = {}
    # default parameters; config entries override them
    defaults: Dict[str, Any] = {}

    def __init__(self, name: str = "suite", config: Optional[SuiteConfig] = None):
        self.name = name
        self.config = config or SuiteConfig(suite=name)
        self.logger = logging.getLogger(f"{__name__}.{name}")
        self.seed = self.config.seed if self.config.seed is not None else settings.default_seed
        self.rng = np.random.default_rng(self.seed)
        self.tolerance_scale = settings.tolerance_scale
        self.start_time = None
        self.checks: List[CheckResult] = []
        self.provenance: Dict[str, Any] = {
            "contour_orientation": self.config.quadrature.orientation or settings.contour_orientation,
            "heat_p_convention": settings.heat_p_convention,
        }

    def log(self, message: str, level: str = "info"):
        """Log a message."""
        log_method = getattr(self.logger, level, self.logger.info)
        log_method(f"[{self.name}] {message}")

    def start(self):
        """Start the suite."""
        self.start_time = datetime.now()
        self.log(f"Starting suite at {self.start_time}")

    def end(self):
        """End the suite."""
        if self.start_time:
            duration = datetime.now() - self.start_time
            self.log(f"Suite completed in {duration.total_seconds():.2f} seconds")

    @property
    def parameters(self) -> Dict[str, Any]:
        """Defaults merged with the config overrides."""
        merged = dict(self.defaults)
        overrides: ParameterOverrides = self.config.parameters
        values = {name: getattr(overrides, name) for name in type(overrides).model_fields}
        merged.update({k: v for k, v in values.items() if v is not None})
        return merged

    def tolerance(self, check: str) -> float:
        base = self.config.tolerances.get(check, self.tolerances.get(check, 1e-8))
        return base * self.tolerance_scale

    def generic(self, scale: float = 0.4, size: Optional[int] = None):
        """Seeded generic complex draw(s) in a box of half-width `scale`."""
        shape = () if size is None else (size,)
        values = scale * (2 * self.rng.random(shape) - 1) + 0.5j * scale * (2 * self.rng.random(shape) - 1)
        return complex(values) if size is None else values

    def record_check(self, check: str, residual: Optional[float], note: Optional[str] = None,
                     tolerance: Optional[float] = None) -> CheckResult:
        """Store a check outcome and log it."""
        tol = self.tolerance(check) if tolerance is None else tolerance * self.tolerance_scale
        passed = residual is not None and bool(np.isfinite(residual)) and residual < tol
        result = CheckResult(name=check, residual=residual, tolerance=tol, passed=passed, note=note)
        self.checks.append(result)
        shown = "error" if residual is None else f"{residual:.3e}"
        self.log(f"{check} residual={shown} tol={tol:.1e} {'PASS' if passed else 'FAIL'}",
                 "info" if passed else "warning")
        return result

    def check(self, name: str, compute: Callable[[], float], note: Optional[str] = None,
              tolerance: Optional[float] = None) -> CheckResult:
        """Run one check; any error becomes a failed check carrying the message."""
        try:
            residual = float(compute())
        except QkzbError as e:
            self.log(f"{name} raised {type(e).__name__}: {e}", "error")
            return self.record_check(name, None, note=str(e), tolerance=tolerance)
        except Exception as e:
            self.logger.exception(f"[{self.name}] {name} raised unexpected {type(e).__name__}")
            return self.record_check(name, None, note=f"unexpected {type(e).__name__}: {e}", tolerance=tolerance)
        return self.record_check(name, residual, note=note, tolerance=tolerance)

    def note(self, key: str, value: Any):
        """Attach a provenance entry (convention flags, reading outcomes)."""
        self.provenance[key] = value

    @abstractmethod
    def execute(self):
        """Run the checks of the suite."""
        pass

    def _apply_quadrature(self) -> Dict[str, Any]:
        """Push the config quadrature overrides into the settings; returns the previous values."""
        overrides = self.config.quadrature.model_dump(exclude_none=True)
        if "orientation" in overrides:
            overrides["contour_orientation"] = overrides.pop("orientation")
        previous = {key: getattr(settings, key) for key in overrides}
        for key, value in overrides.items():
            setattr(settings, key, value)
        return previous

    def run(self, out: Optional[Path] = None) -> Report:
        """Run the suite and persist its report."""
        self.start()
        previous = self._apply_quadrature()
        try:
            self.execute()
        except Exception as e:
            self.logger.exception(f"[{self.name}] Suite aborted: {e}")
            self.record_check("suite-aborted", None, note=f"{type(e).__name__}: {e}")
        finally:
            for key, value in previous.items():
                setattr(settings, key, value)
            self.end()

        report = Report(
            suite=self.name,
            seed=self.seed,
            parameters=to_jsonable(self.parameters),
            checks=self.checks,
            provenance=to_jsonable(self.provenance),
        )
        self.save_report(report, out)
        return report

    def save_report(self, report: Report, out: Optional[Path] = None) -> Path:
        """Save the report as JSON."""
        path = out or settings.reports_dir / f"{self.name}.json"
        save_json(report.to_json_dict(), Path(path))
        self.log(f"Saved report to {path}")
        return Path(path)

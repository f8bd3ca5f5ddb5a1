"""Verification suites and their registry."""

from typing import Dict, Optional, Type

from core.exceptions import ConfigError
from core.models import SuiteConfig
from pipelines.algebra_suite import QkzbSuite, RMatrixSuite
from pipelines.base import BaseSuite
from pipelines.blocks_suite import BlocksSuite, SemiclassicalSuite
from pipelines.integrals_suite import ConjectureSuite, HeatSuite, HypergeometricSuite
from pipelines.special_suite import GaussSumSuite, SpecialFunctionSuite

SUITES: Dict[str, Type[BaseSuite]] = {
    "gauss-sums": GaussSumSuite,
    "special": SpecialFunctionSuite,
    "rmatrix": RMatrixSuite,
    "qkzb": QkzbSuite,
    "hyperfun": HypergeometricSuite,
    "heat": HeatSuite,
    "conjecture": ConjectureSuite,
    "blocks": BlocksSuite,
    "semiclassical": SemiclassicalSuite,
}


def get_suite(name: str, config: Optional[SuiteConfig] = None) -> BaseSuite:
    """Instantiate a registered suite."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite '{name}'; available: {', '.join(SUITES)}")
    if config is not None and config.suite != name:
        raise ConfigError(f"config is for suite '{config.suite}', not '{name}'")
    return SUITES[name](config=config)

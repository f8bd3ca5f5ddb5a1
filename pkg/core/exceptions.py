"""Exception hierarchy for the toolkit."""

from typing import Optional


class QkzbError(Exception):
    """Base class for all toolkit errors."""


class DomainError(QkzbError):
    """Argument outside the domain of an operation."""


class PoleError(QkzbError):
    """A denominator vanished (below the pole threshold)."""

    def __init__(self, message: str, factor: Optional[str] = None):
        super().__init__(message if factor is None else f"{message} [factor: {factor}]")
        self.factor = factor


class SingularParameterError(PoleError):
    """A factor of the phase function product vanished."""


class FusionSingularError(QkzbError):
    """An elliptic factorial used by fusion vanished."""


class GridMismatchError(QkzbError):
    """A dynamical shift does not land on the rational grid."""


class DivergenceError(QkzbError):
    """A path integrand does not decay at the truncation points."""


class NonConvergentRegionError(QkzbError):
    """Torus quadrature requested outside its convergent region."""


class ContourError(QkzbError):
    """No admissible integration cycle could be built."""


class ConfigError(QkzbError):
    """Invalid suite configuration."""


class RefinementNeeded(QkzbError):
    """Internal signal asking the quadrature driver for a finer rule."""

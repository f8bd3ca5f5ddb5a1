"""Finite differences, extrapolation and small numerical helpers."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def max_abs(values) -> float:
    """Max-norm of an array-like (0 for empty input)."""
    array = np.asarray(values)
    return float(np.max(np.abs(array))) if array.size else 0.0


def relative_residual(lhs, rhs, floor: float = 1e-300) -> float:
    """max|lhs - rhs| / max(max|lhs|, max|rhs|)."""
    scale = max(max_abs(lhs), max_abs(rhs), floor)
    return max_abs(np.asarray(lhs) - np.asarray(rhs)) / scale


def derivative(f: Callable[[complex], complex], x: complex, h: float = 1e-5, direction: complex = 1.0) -> complex:
    """Central first derivative of f along direction (|direction| = 1)."""
    step = h * direction
    return (f(x + step) - f(x - step)) / (2 * step)


def second_derivative(f: Callable[[complex], complex], x: complex, h: float = 1e-3) -> complex:
    """Five-point second derivative along the real direction."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def richardson_checked(
    estimate: Callable[[float], complex],
    h: float,
    tolerance: float,
    label: str = "finite difference",
) -> Tuple[complex, bool]:
    """
    Evaluate a step-size dependent estimate at h and h/2.

    Args:
        estimate: function of the step size
        h: base step
        tolerance: allowed disagreement between the two steps
        label: name used in the instability warning

    Returns:
        (value at h/2, stable flag)
    """
    coarse = estimate(h)
    fine = estimate(h / 2)
    disagreement = abs(coarse - fine)
    stable = disagreement <= tolerance * max(1.0, abs(fine))
    if not stable:
        logger.warning(f"{label}: step-size instability ({disagreement:.3e} between h and h/2)")
    return fine, stable


def polynomial_fit(xs: Sequence[complex], ys: Sequence[complex], degree: int) -> np.ndarray:
    """
    Least-squares polynomial coefficients (constant term first) for complex data.

    Args:
        xs: sample abscissae
        ys: sample values
        degree: polynomial degree

    Returns:
        Coefficients c_0..c_degree
    """
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    # fit in x/max|x| so the Vandermonde columns stay comparable
    scale = max(float(np.max(np.abs(xs))), 1e-300)
    vander = np.vander(xs / scale, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(vander, ys, rcond=None)
    return coeffs / scale ** np.arange(degree + 1)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Slope of log|y| against log|x|."""
    lx = np.log(np.abs(np.asarray(xs, dtype=complex)))
    ly = np.log(np.abs(np.asarray(ys, dtype=complex)))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map fn over items with at most QKZB_THREADS workers, preserving order."""
    items = list(items)
    workers = max(1, int(settings.qkzb_threads))
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

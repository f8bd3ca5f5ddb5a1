"""Theta spaces, the spaces E_{kappa,2m,eta}, the KZB connection and its horizontal sections."""

import logging
from typing import Callable, List, Sequence

import numpy as np

from core.exceptions import DomainError
from stages.special.theta import (
    dedekind_eta,
    dedekind_eta_log_derivative,
    theta,
    theta_level,
    weierstrass_p,
)
from utils.numerics import derivative, relative_residual, richardson_checked, second_derivative

logger = logging.getLogger(__name__)

LambdaClosure = Callable[[np.ndarray], np.ndarray]
SectionClosure = Callable[[complex, complex], complex]

SAMPLE_POINTS = np.array([0.137 + 0.052j, -0.291 + 0.118j, 0.406 - 0.071j, 0.233 + 0.301j, -0.118 - 0.204j])
SHIFTS = [(r, s) for r in (-1, 0, 1) for s in (-1, 0, 1) if (r, s) != (0, 0)]


def dim_E(kappa: int, m: int) -> int:
    """kappa - 2m - 1 if kappa >= 2m + 2, else 0."""
    if kappa < 0 or m < 0:
        raise DomainError("kappa and m must be nonnegative")
    return kappa - 2 * m - 1 if kappa >= 2 * m + 2 else 0


def invariant_theta(j: int, level: int, tau: complex) -> LambdaClosure:
    """Even theta function theta_{j,level} + theta_{-j,level}; the constant 1 at level 0."""
    if level == 0:
        return lambda lam: np.ones_like(np.asarray(lam, dtype=complex))
    return lambda lam: theta_level(j, level, lam, tau) + theta_level(-j, level, lam, tau)


def odd_theta(j: int, kappa: int, tau: complex) -> LambdaClosure:
    """theta_{j,kappa} - theta_{-j,kappa}."""
    return lambda lam: theta_level(j, kappa, lam, tau) - theta_level(-j, kappa, lam, tau)


def quasi_periodicity_multiplier(kappa: int, m: int, eta: complex, tau: complex, lam, s: int):
    """exp(4 pi i eta m(m+1) s - 2 pi i kappa (s^2 tau + s lambda))."""
    return np.exp(4j * np.pi * eta * m * (m + 1) * s - 2j * np.pi * kappa * (s * s * tau + s * lam))


def membership_residual(kappa: int, m: int, eta: complex, tau: complex, f: LambdaClosure,
                        lam: Sequence[complex] = SAMPLE_POINTS) -> float:
    """
    Worst relative defect of the three conditions defining E_{kappa,2m,eta}(tau):
    quasi-periodicity under 2r + 2s tau, the twisted reflection, and vanishing at 2 eta j + lattice.
    """
    lam = np.asarray(lam, dtype=complex)
    base = np.asarray(f(lam), dtype=complex)
    scale = max(float(np.max(np.abs(base))), 1e-300)
    worst = 0.0
    for r, s in SHIFTS:
        moved = np.asarray(f(lam + 2 * r + 2 * s * tau), dtype=complex)
        worst = max(worst, relative_residual(moved, quasi_periodicity_multiplier(kappa, m, eta, tau, lam, s) * base))
    twist = np.full(lam.shape, (-1.0) ** (m + 1), dtype=complex)
    for j in range(1, m + 1):
        twist *= theta(lam + 2 * eta * j, tau) / theta(lam - 2 * eta * j, tau)
    worst = max(worst, relative_residual(np.asarray(f(-lam), dtype=complex), twist * base))
    zeros = np.array([2 * eta * j + r + s * tau for j in range(m + 1) for r in (-1, 0, 1) for s in (-1, 0, 1)])
    worst = max(worst, float(np.max(np.abs(np.asarray(f(zeros))))) / scale)
    return worst


def invariant_theta_residual(level: int, f: LambdaClosure, tau: complex, lam: Sequence[complex] = SAMPLE_POINTS) -> float:
    """Defect of f as an element of the even level-`level` theta space."""
    lam = np.asarray(lam, dtype=complex)
    base = np.asarray(f(lam), dtype=complex)
    worst = relative_residual(np.asarray(f(-lam), dtype=complex), base)
    for r, s in SHIFTS:
        moved = np.asarray(f(lam + 2 * r + 2 * s * tau), dtype=complex)
        worst = max(worst, relative_residual(moved, quasi_periodicity_multiplier(level, 0, 0.0, tau, lam, s) * base))
    return worst


def divisor_product(m: int, eta: complex, tau: complex) -> LambdaClosure:
    """lambda -> prod_{j=0}^m theta(lambda - 2 eta j, tau)."""
    def product(lam):
        lam = np.asarray(lam, dtype=complex)
        out = np.ones_like(lam)
        for j in range(m + 1):
            out = out * theta(lam - 2 * eta * j, tau)
        return out
    return product


def e_space_basis(kappa: int, m: int, eta: complex, tau: complex) -> List[LambdaClosure]:
    """prod_{j=0}^m theta(lambda - 2 eta j) times the even thetas of level kappa - 2m - 2."""
    if dim_E(kappa, m) == 0:
        return []
    level = kappa - 2 * m - 2
    divisor = divisor_product(m, eta, tau)
    basis = []
    for j in range(level + 1):
        even = invariant_theta(j, level, tau)
        basis.append(lambda lam, even=even: divisor(lam) * even(lam))
    return basis


def e_space_rank(kappa: int, m: int, eta: complex, tau: complex, rtol: float = 1e-8) -> int:
    """Numerical rank of the basis sampled at generic points."""
    basis = e_space_basis(kappa, m, eta, tau)
    if not basis:
        return 0
    points = 0.083 + 0.61 * np.arange(2 * len(basis) + 3) / (2 * len(basis) + 3) + 0.17j * np.cos(np.arange(2 * len(basis) + 3))
    samples = np.column_stack([f(points) for f in basis])
    singular = np.linalg.svd(samples, compute_uv=False)
    return int(np.sum(singular > rtol * singular[0]))


def horizontal_section(j: int, kappa: int, eta_power: int = 1) -> SectionClosure:
    """
    eta(tau)^{eta_power} (theta_{j+1,kappa} - theta_{-j-1,kappa}), j = 0..kappa-2.

    Only eta_power = +1 is annihilated by the connection below.
    """
    if not 0 <= j <= kappa - 2:
        raise DomainError(f"section index {j} outside 0..{kappa - 2}")
    return lambda lam, tau: dedekind_eta(tau) ** eta_power * (
        theta_level(j + 1, kappa, lam, tau) - theta_level(-j - 1, kappa, lam, tau)
    )


def kzb_connection(kappa: int, m: int, v: SectionClosure, lam: complex, tau: complex,
                   h_tau: float = 1e-4, h_lam: float = 1e-3, tolerance: float = 1e-6) -> complex:
    """
    (d_tau - (d_lambda^2 - m(m+1) p(lambda, tau))/(2 pi i kappa) - eta'/eta) v at (lambda, tau).

    The tau-derivative is checked at two step sizes; disagreement is logged as a warning.
    """
    d_tau, _ = richardson_checked(
        lambda h: derivative(lambda t: v(lam, t), tau, h),
        h_tau, tolerance, label="d/dtau",
    )
    d2_lam = second_derivative(lambda x: v(x, tau), lam, h_lam)
    value = v(lam, tau)
    potential = m * (m + 1) * weierstrass_p(lam, tau) * value if m else 0.0
    return complex(d_tau - (d2_lam - potential) / (2j * np.pi * kappa) - dedekind_eta_log_derivative(tau) * value)

"""Jacobi theta function, its derivatives, level-kappa thetas and the Weierstrass function."""

import math
from typing import Optional

import numpy as np

from config import settings
from core.exceptions import DomainError, PoleError
from core.models import TruncationPolicy

TWO_PI_I = 2j * np.pi


def _policy(policy: Optional[TruncationPolicy]) -> TruncationPolicy:
    return policy or TruncationPolicy(product_terms=settings.product_terms, target_abs_err=settings.target_abs_err)


def check_modulus(tau: complex, name: str = "tau"):
    """Raise DomainError unless Im tau > 0."""
    if complex(tau).imag <= 0:
        raise DomainError(f"Im {name} must be positive, got {tau}")


def require_nonzero(values, factor: str):
    """Raise PoleError if any entry is below the pole threshold."""
    array = np.asarray(values)
    if array.size and np.min(np.abs(array)) < settings.pole_threshold:
        raise PoleError("vanishing denominator", factor=factor)
    return values


def series_cutoff(tau: complex, imag_spread: float, policy: Optional[TruncationPolicy] = None) -> int:
    """
    Number J of terms on each side of the theta series.

    Args:
        tau: modulus
        imag_spread: max |Im t| over the evaluation points
        policy: truncation policy

    Returns:
        J such that |j + 1/2| <= J covers the Gaussian tail
    """
    policy = _policy(policy)
    if policy.series_terms is not None:
        base = policy.series_terms
    else:
        base = math.ceil(math.sqrt(abs(math.log(policy.target_abs_err)) / (math.pi * tau.imag))) + 4
    return base + math.ceil(imag_spread / tau.imag)


def theta_derivative(t, tau: complex, order: int = 0, policy: Optional[TruncationPolicy] = None):
    """
    Derivative of theta(t, tau) = -sum_j exp(pi i r^2 tau + 2 pi i r (t + 1/2)), r = j + 1/2.

    Args:
        t: scalar or array of arguments
        tau: modulus with Im tau > 0
        order: derivative order in t
        policy: truncation policy

    Returns:
        Values with the shape of t
    """
    tau = complex(tau)
    check_modulus(tau)
    t_arr = np.asarray(t, dtype=complex)
    spread = float(np.max(np.abs(t_arr.imag))) if t_arr.size else 0.0
    J = series_cutoff(tau, spread, policy)
    r = np.arange(-J, J) + 0.5
    exponent = np.pi * 1j * r * r * tau + TWO_PI_I * r * (t_arr[..., None] + 0.5)
    terms = np.exp(exponent)
    if order:
        terms = terms * (TWO_PI_I * r) ** order
    value = -np.sum(terms, axis=-1)
    return value if t_arr.ndim else complex(value)


def theta(t, tau: complex, policy: Optional[TruncationPolicy] = None):
    """First Jacobi theta function; odd, zeros on Z + tau Z."""
    return theta_derivative(t, tau, 0, policy)


def theta_prime(t, tau: complex, policy: Optional[TruncationPolicy] = None):
    """Term-wise differentiated series."""
    return theta_derivative(t, tau, 1, policy)


def theta_ratio(num, den, tau: complex, factor: str = "theta"):
    """theta(num)/theta(den) with a pole check on the denominator."""
    bottom = theta(den, tau)
    require_nonzero(bottom, factor)
    return theta(num, tau) / bottom


def weierstrass_p(t, tau: complex, policy: Optional[TruncationPolicy] = None):
    """
    Weierstrass function with periods 1 and tau.

    Uses p = -(log theta)'' + theta'''(0)/(3 theta'(0)); the constant fixes the
    Laurent normalization p(t) = 1/t^2 + O(t^2).
    """
    t_arr = np.asarray(t, dtype=complex)
    th = theta(t_arr, tau, policy)
    require_nonzero(th, "theta(t) (lattice point)")
    d1 = theta_derivative(t_arr, tau, 1, policy)
    d2 = theta_derivative(t_arr, tau, 2, policy)
    constant = theta_derivative(0.0, tau, 3, policy) / (3 * theta_derivative(0.0, tau, 1, policy))
    value = (d1 * d1 - th * d2) / (th * th) + constant
    return value if t_arr.ndim else complex(value)


def weierstrass_p_lattice(t: complex, tau: complex) -> complex:
    """
    Lattice sum of p with the rows m + n tau, |n| <= n_max, summed in closed form (test oracle).

    Row n contributes pi^2/sin^2(pi(t + n tau)) - pi^2/sin^2(pi n tau); row 0 carries
    pi^2/sin^2(pi t) - pi^2/3. Rows decay like exp(-2 pi |n| Im tau).
    """
    tau = complex(tau)
    check_modulus(tau)
    t = complex(t)
    n_max = math.ceil((40.0 + 2 * math.pi * abs(t.imag)) / (2 * math.pi * tau.imag)) + 2
    n = np.arange(1, n_max + 1)
    shifted = np.sin(np.pi * (t + np.concatenate([-n[::-1], [0], n]) * tau))
    if np.min(np.abs(shifted)) < settings.pole_threshold:
        raise PoleError("lattice point", factor="t")
    periods = np.sin(np.pi * n * tau)
    rows = np.sum(np.pi ** 2 / shifted ** 2)
    constants = 2 * np.sum(np.pi ** 2 / periods ** 2) + np.pi ** 2 / 3
    return complex(rows - constants)


def _product_terms(nome_abs: float, policy: Optional[TruncationPolicy]) -> int:
    policy = _policy(policy)
    needed = math.ceil(math.log(policy.target_abs_err) / math.log(nome_abs)) + 2 if nome_abs > 0 else 1
    return max(1, min(policy.product_terms, needed))


def dedekind_eta(tau: complex, policy: Optional[TruncationPolicy] = None) -> complex:
    """eta(tau) = e^{pi i tau/12} prod_{j>=1} (1 - e^{2 pi i j tau})."""
    tau = complex(tau)
    check_modulus(tau)
    q = np.exp(TWO_PI_I * tau)
    K = _product_terms(abs(q), policy)
    j = np.arange(1, K + 1)
    return complex(np.exp(np.pi * 1j * tau / 12) * np.prod(1 - q ** j))


def dedekind_eta_log_derivative(tau: complex, policy: Optional[TruncationPolicy] = None) -> complex:
    """eta'(tau)/eta(tau) from the product formula."""
    tau = complex(tau)
    check_modulus(tau)
    q = np.exp(TWO_PI_I * tau)
    K = _product_terms(abs(q), policy)
    j = np.arange(1, K + 1)
    qj = q ** j
    return complex(np.pi * 1j / 12 - np.sum(TWO_PI_I * j * qj / (1 - qj)))


def alpha_gauss(lam, eta: complex):
    """alpha(lambda) = exp(-pi i lambda^2 / (4 eta))."""
    if eta == 0:
        raise DomainError("eta must be nonzero")
    lam_arr = np.asarray(lam, dtype=complex)
    value = np.exp(-np.pi * 1j * lam_arr * lam_arr / (4 * eta))
    return value if lam_arr.ndim else complex(value)


def theta_level(j: int, kappa: int, lam, tau: complex, policy: Optional[TruncationPolicy] = None, order: int = 0):
    """
    theta_{j,kappa}(lambda, tau) = sum_{r in Z + j/2kappa} exp(2 pi i kappa (r^2 tau + r lambda)).

    Args:
        j: index mod 2 kappa
        kappa: positive level
        lam: scalar or array
        tau: modulus
        policy: truncation policy
        order: derivative order in lambda (term-wise)

    Returns:
        Values with the shape of lam
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    tau = complex(tau)
    check_modulus(tau)
    policy = _policy(policy)
    lam_arr = np.asarray(lam, dtype=complex)
    spread = float(np.max(np.abs(lam_arr.imag))) if lam_arr.size else 0.0
    shift = (j % (2 * kappa)) / (2 * kappa)
    half_width = math.ceil(math.sqrt(abs(math.log(policy.target_abs_err)) / (2 * math.pi * kappa * tau.imag))) + 3
    half_width += math.ceil(spread / (2 * tau.imag)) + 1
    r = np.arange(-half_width, half_width + 1) + shift
    exponent = TWO_PI_I * kappa * (r * r * tau + r * lam_arr[..., None])
    terms = np.exp(exponent)
    if order:
        terms = terms * (TWO_PI_I * kappa * r) ** order
    value = np.sum(terms, axis=-1)
    return value if lam_arr.ndim else complex(value)


# ---------------------------------------------------------------------- identity residuals


def _relative(lhs, rhs) -> float:
    """max |lhs - rhs| over the larger of max |lhs| and max |rhs|."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), 1e-300)
    return float(np.max(np.abs(lhs - rhs))) / scale


def theta_shift_residuals(t, tau: complex) -> dict:
    """Oddness, theta(t+2) = theta(t) and theta(t+2 tau) = e^{-4 pi i (t+tau)} theta(t), each relative to its own sides."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=complex))
    base = theta(t_arr, tau)
    return {
        "odd": _relative(theta(-t_arr, tau), -base),
        "period_2": _relative(theta(t_arr + 2, tau), base),
        "period_2tau": _relative(theta(t_arr + 2 * tau, tau), np.exp(-4j * np.pi * (t_arr + tau)) * base),
    }


def addition_residual(t: complex, lam: complex, tau: complex) -> float:
    """
    theta(t+lambda) theta(t-lambda)/(theta(t)^2 theta(lambda)^2) against (p(lambda) - p(t))/theta'(0)^2,
    with p taken from the lattice sum.
    """
    lhs = theta(t + lam, tau) * theta(t - lam, tau) / (theta(t, tau) ** 2 * theta(lam, tau) ** 2)
    rhs = (weierstrass_p_lattice(lam, tau) - weierstrass_p_lattice(t, tau)) / theta_prime(0.0, tau) ** 2
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def level_heat_residual(j: int, kappa: int, lam: complex, tau: complex, h: float = 1e-3) -> float:
    """
    2 pi i kappa d_tau theta_{j,kappa} - d_lambda^2 theta_{j,kappa}.

    d_tau is a fourth-order difference along Im tau, d_lambda^2 the term-wise series.
    The defect is taken relative to the largest of |theta|, |2 pi i kappa d_tau| and |d_lambda^2|.
    """
    def at(shift):
        return theta_level(j, kappa, lam, tau + 1j * shift)

    d_tau = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12j * h)
    d2 = theta_level(j, kappa, lam, tau, order=2)
    lhs = 2j * np.pi * kappa * d_tau
    scale = max(abs(theta_level(j, kappa, lam, tau)), abs(lhs), abs(d2), 1e-300)
    return abs(lhs - d2) / scale

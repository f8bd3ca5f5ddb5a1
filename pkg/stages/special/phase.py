"""Phase function Omega_a(z, tau, p) as a truncated double product."""

import math
from typing import Optional

import numpy as np

from config import settings
from core.exceptions import SingularParameterError
from core.models import TruncationPolicy
from stages.special.theta import TWO_PI_I, check_modulus, theta


def product_cutoff(tau: complex, p: complex, imag_spread: float, policy: Optional[TruncationPolicy] = None) -> int:
    """
    Double-product cutoff K from the geometric tail max(|e(tau)|, |e(p)|).

    Args:
        tau, p: moduli
        imag_spread: max |Im| of the linear arguments
        policy: truncation policy

    Returns:
        K, capped by the policy's product_terms
    """
    policy = policy or TruncationPolicy(product_terms=settings.product_terms, target_abs_err=settings.target_abs_err)
    nome = max(math.exp(-2 * math.pi * tau.imag), math.exp(-2 * math.pi * p.imag))
    needed = (math.log(policy.target_abs_err) - 2 * math.pi * imag_spread) / math.log(nome)
    return max(2, min(policy.product_terms, math.ceil(needed) + 2))


def _factors(a: complex, z, tau: complex, p: complex, policy: Optional[TruncationPolicy]):
    tau, p, a = complex(tau), complex(p), complex(a)
    check_modulus(tau)
    check_modulus(p, "p")
    z_arr = np.asarray(z, dtype=complex)
    spread = float(np.max(np.abs(z_arr.imag))) + abs(a.imag) if z_arr.size else abs(a.imag)
    K = product_cutoff(tau, p, spread, policy)
    j = np.arange(K)
    grid = np.exp(TWO_PI_I * (j[:, None] * tau + j[None, :] * p))
    qr = np.exp(TWO_PI_I * (tau + p))
    x = z_arr[..., None, None]
    num_low = 1 - np.exp(TWO_PI_I * (x - a)) * grid
    num_up = 1 - np.exp(TWO_PI_I * (-x - a)) * qr * grid
    den_low = 1 - np.exp(TWO_PI_I * (x + a)) * grid
    den_up = 1 - np.exp(TWO_PI_I * (-x + a)) * qr * grid
    return z_arr, num_low, num_up, den_low, den_up


def omega_phase(a: complex, z, tau: complex, p: complex, policy: Optional[TruncationPolicy] = None):
    """
    Omega_a(z, tau, p) = prod_{j,k>=0} (1-e(z-a+j tau+k p))(1-e(-z-a+(j+1)tau+(k+1)p))
                                     / (1-e(z+a+j tau+k p))(1-e(-z+a+(j+1)tau+(k+1)p)).

    Raises:
        SingularParameterError: a denominator factor vanishes
    """
    z_arr, num_low, num_up, den_low, den_up = _factors(a, z, tau, p, policy)
    den = den_low * den_up
    if np.min(np.abs(den)) < settings.pole_threshold:
        raise SingularParameterError("phase function denominator vanishes", factor=f"Omega_{a}")
    value = np.prod((num_low * num_up / den).reshape(z_arr.shape + (-1,)), axis=-1)
    return value if z_arr.ndim else complex(value)


def omega_tilde(a: complex, z, tau: complex, p: complex, policy: Optional[TruncationPolicy] = None):
    """Omega_a with the (0,0) factors 1-e(z-a) and 1-e(z+a) removed."""
    z_arr, num_low, num_up, den_low, den_up = _factors(a, z, tau, p, policy)
    num_low[..., 0, 0] = 1.0
    den_low[..., 0, 0] = 1.0
    den = den_low * den_up
    if np.min(np.abs(den)) < settings.pole_threshold:
        raise SingularParameterError("phase function denominator vanishes", factor=f"Omega~_{a}")
    value = np.prod((num_low * num_up / den).reshape(z_arr.shape + (-1,)), axis=-1)
    return value if z_arr.ndim else complex(value)


def functional_equation_residual(a: complex, z: complex, tau: complex, p: complex) -> float:
    """Omega_a(z+p)/Omega_a(z) against e^{2 pi i a} theta(z+a, tau)/theta(z-a, tau)."""
    ratio = omega_phase(a, z + p, tau, p) / omega_phase(a, z, tau, p)
    expected = np.exp(TWO_PI_I * a) * theta(z + a, tau) / theta(z - a, tau)
    return abs(ratio - expected) / max(abs(expected), 1e-300)


def symmetry_residual(a: complex, z: complex, tau: complex, p: complex) -> float:
    """Omega_a(z, tau, p) against Omega_a(z, p, tau)."""
    lhs = omega_phase(a, z, tau, p)
    rhs = omega_phase(a, z, p, tau)
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)

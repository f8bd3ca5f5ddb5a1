"""Heat operators on the spaces E_{kappa,2m,eta}: T_{kappa,0}, T_{kappa,m}, and the kernels V and M."""

import logging
from typing import Dict, Optional, Sequence

import numpy as np

from config import settings
from core.exceptions import DomainError
from core.models import HighestWeights
from stages.blocks.spaces import SAMPLE_POINTS, LambdaClosure, odd_theta
from stages.integrals.contour import default_path, integrate_pointwise, residue
from stages.integrals.heat import HeatOperator
from stages.integrals.shapovalov import pairing_path
from stages.integrals.hyperfun import HypergeometricFunction
from stages.special.theta import alpha_gauss, require_nonzero, theta, theta_level, theta_prime
from utils.numerics import relative_residual

logger = logging.getLogger(__name__)


def gaussian_normalization(eta: complex) -> complex:
    """i/sqrt(4 i eta), principal branch."""
    return 1j / np.sqrt(4j * complex(eta))


def heat_modulus(kappa: int, eta: complex, tau: complex, convention: Optional[str] = None) -> complex:
    """
    Step p of T(z=0, tau, p) used for level kappa.

    "minus_2_eta_kappa": p = -2 eta kappa, input functions live at tau - 2 eta kappa.
    "tau_minus_2_eta_kappa": p = tau - 2 eta kappa, read literally.
    """
    convention = convention or settings.heat_p_convention
    if convention == "minus_2_eta_kappa":
        return -2 * eta * kappa
    if convention == "tau_minus_2_eta_kappa":
        return tau - 2 * eta * kappa
    raise DomainError(f"unknown heat convention {convention}")


# ---------------------------------------------------------------------- m = 0


def heat_T_kappa0(kappa: int, eta: complex, tau: complex, v: LambdaClosure, normalized: bool = True) -> LambdaClosure:
    """
    T_{kappa,0} v(lambda) = integral over 2 eta R of e^{-pi i (lambda+mu)^2/4eta} v(-mu) d mu,
    times i/sqrt(4 i eta) when normalized.
    """
    if kappa < 2:
        raise DomainError("T_{kappa,0} needs kappa >= 2")
    path = default_path(eta, 0j, scale=2.0)
    constant = gaussian_normalization(eta) if normalized else 1.0

    def integrand(lam, mu):
        return np.exp(-np.pi * 1j * (lam + mu) ** 2 / (4 * eta)) * np.asarray(v(-mu), dtype=complex)

    def image(lam):
        return constant * integrate_pointwise(integrand, lam, path, lambda a: -a)

    return image


def theta_identity_residual(j: int, kappa: int, eta: complex, tau: complex, lam: Sequence[complex] = SAMPLE_POINTS) -> float:
    """theta_{j,kappa}(lambda, tau) against the normalized T_{kappa,0} image of theta_{j,kappa}(., tau - 2 eta kappa)."""
    sigma = tau + heat_modulus(kappa, eta, tau)
    image = heat_T_kappa0(kappa, eta, tau, lambda x: theta_level(j, kappa, x, sigma))(lam)
    return relative_residual(image, theta_level(j, kappa, np.asarray(lam, dtype=complex), tau))


def projective_horizontality(kappa: int, j: int, eta: complex, tau: complex, lam: Sequence[complex] = SAMPLE_POINTS) -> Dict[str, complex]:
    """T_{kappa,0} of the odd section at tau - 2 eta kappa divided by the same section at tau."""
    sigma = tau + heat_modulus(kappa, eta, tau)
    lam = np.asarray(lam, dtype=complex)
    image = heat_T_kappa0(kappa, eta, tau, odd_theta(j, kappa, sigma), normalized=False)(lam)
    ratios = image / odd_theta(j, kappa, tau)(lam)
    mean = complex(np.mean(ratios))
    return {"constant": mean, "spread": float(np.max(np.abs(ratios - mean)) / abs(mean))}


# ---------------------------------------------------------------------- kernel V and T_{kappa,1}


class KernelV:
    """
    V(lambda, mu, tau, sigma) = e^{-pi i lambda mu/2eta} integral over gamma of Omega_{2eta}(t, tau, sigma)
        theta(lambda+t, tau) theta(mu+t, sigma) / (theta(t-2eta, tau) theta(lambda+2eta, tau) theta(t-2eta, sigma) theta(mu+2eta, sigma)),
    with constant c = 1.
    """

    def __init__(self, tau: complex, sigma: complex, eta: complex, orientation: Optional[str] = None):
        self.tau, self.sigma, self.eta = complex(tau), complex(sigma), complex(eta)
        self.u = HypergeometricFunction((0j,), tau, sigma, HighestWeights(lambdas=(2.0,)), eta, orientation=orientation)

    def table(self, lam, mu) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        mu = np.atleast_1d(np.asarray(mu, dtype=complex))
        den_lam = theta(lam + 2 * self.eta, self.tau)
        den_mu = theta(mu + 2 * self.eta, self.sigma)
        require_nonzero(den_lam, "theta(lambda+2eta, tau)")
        require_nonzero(den_mu, "theta(mu+2eta, sigma)")
        return self.u.table(lam, mu)[:, :, 0, 0] / np.outer(den_lam, den_mu)

    def __call__(self, lam: complex, mu: complex) -> complex:
        return complex(self.table(lam, mu)[0, 0])

    def residue_at(self, center: complex, mu: complex) -> complex:
        return complex(residue(lambda x: self.table(x, mu)[:, 0], center))


def kernel_V(lam, mu, tau, sigma, eta, orientation: Optional[str] = None) -> complex:
    return KernelV(tau, sigma, eta, orientation)(lam, mu)


def kernel_V_residue(mu: complex, tau: complex, sigma: complex, eta: complex, r: int = 0, s: int = 0,
                     orientation: Optional[str] = None) -> float:
    """
    V(2eta + r + s tau, mu) against (theta'(0, tau)/theta(4eta, tau)) e^{2 pi i s sigma} res_{lambda = -2eta + r + s tau} V.
    """
    kernel = KernelV(tau, sigma, eta, orientation)
    lattice = r + s * kernel.tau
    value = kernel(2 * eta + lattice, mu)
    res = kernel.residue_at(-2 * eta + lattice, mu)
    expected = theta_prime(0.0, tau) / theta(4 * eta, tau) * np.exp(2j * np.pi * s * sigma) * res
    return relative_residual(value, expected)


def phi_multiplier(m: int, eta: complex, tau: complex) -> LambdaClosure:
    """lambda -> prod_{j=1}^m theta(lambda + 2 eta j, tau)."""
    def product(lam):
        lam = np.asarray(lam, dtype=complex)
        out = np.ones_like(lam)
        for j in range(1, m + 1):
            out = out * theta(lam + 2 * eta * j, tau)
        return out
    return product


def heat_T_kappa_m(kappa: int, m: int, eta: complex, tau: complex, v: LambdaClosure,
                   convention: Optional[str] = None) -> LambdaClosure:
    """T_{kappa,m}(tau) = phi_m(tau)^{-1} T(z=0, tau, p) phi_m(tau + p) for m in {0, 1}."""
    if m not in (0, 1):
        raise DomainError("T_{kappa,m} is implemented for m in {0, 1}")
    if kappa < 2 * m + 2:
        raise DomainError("T_{kappa,m} needs kappa >= 2m + 2")
    p = heat_modulus(kappa, eta, tau, convention)
    weights = HighestWeights(lambdas=(2.0 * m,))
    # the E-space zeros cancel the poles of Q, so the path may follow the saddle
    operator = HeatOperator((0j,), tau, p, weights, eta, saddle=True)
    before = phi_multiplier(m, eta, tau + p)
    after = phi_multiplier(m, eta, tau)
    inner = operator.closure(lambda x: (np.asarray(before(x)) * np.asarray(v(x), dtype=complex).reshape(-1))[:, None])

    def image(lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        den = after(lam)
        require_nonzero(den, "phi_m(lambda)")
        return inner(lam)[:, 0] / den

    return image


def vanishing_residual(image: LambdaClosure, eta: complex, tau: complex, scale_points: Sequence[complex] = SAMPLE_POINTS) -> float:
    """max |image| on {r + s tau, 2eta + r + s tau : r, s in {0, +-1}}, relative to its size at generic points."""
    points = np.array([c + r + s * tau for c in (0.0, 2 * eta) for r in (-1, 0, 1) for s in (-1, 0, 1)])
    scale = max(float(np.max(np.abs(image(np.asarray(scale_points, dtype=complex))))), 1e-300)
    return float(np.max(np.abs(image(points)))) / scale


# ---------------------------------------------------------------------- kernel M


class KernelM:
    """
    M(lambda, mu, tau, p) = e^{-pi i (lambda+mu)^2/4eta} u_0(lambda, mu, tau, p) theta(mu, p)
        / prod_{j=-m}^m theta(lambda - 2 eta j, tau),

    where u_0 is the n=1, Lambda=2m hypergeometric integral without its exponential prefactor.
    """

    def __init__(self, m: int, tau: complex, p: complex, eta: complex):
        if m < 0 or m > 2:
            raise DomainError("kernel M is implemented for m <= 2")
        self.m = m
        self.tau, self.p, self.eta = complex(tau), complex(p), complex(eta)
        self.u = HypergeometricFunction((0j,), tau, p, HighestWeights(lambdas=(2.0 * m,)), eta)

    def table(self, lam, mu) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        mu = np.atleast_1d(np.asarray(mu, dtype=complex))
        den = np.ones_like(lam)
        for j in range(-self.m, self.m + 1):
            den = den * theta(lam - 2 * self.eta * j, self.tau)
        require_nonzero(den, "prod theta(lambda - 2 eta j)")
        # alpha(lambda) alpha(mu) e^{-pi i lambda mu/2eta} = e^{-pi i (lambda+mu)^2/4eta}
        gauss = np.outer(alpha_gauss(lam, self.eta), alpha_gauss(mu, self.eta))
        return gauss * self.u.table(lam, mu)[:, :, 0, 0] * theta(mu, self.p)[None, :] / den[:, None]


def kernel_M(m: int, lam, mu, tau, p, eta) -> complex:
    return complex(KernelM(m, tau, p, eta).table(lam, mu)[0, 0])


def M_operator(m: int, kappa: int, eta: complex, tau: complex, phi: LambdaClosure,
               convention: Optional[str] = None) -> LambdaClosure:
    """M(tau) phi(lambda) = integral over 2 eta R of M(lambda, mu, tau, tau - 2 eta kappa) phi(-mu) d mu."""
    sigma = tau + heat_modulus(kappa, eta, tau, convention)
    kernel = KernelM(m, tau, sigma, eta)
    path = pairing_path(eta)

    def integrand(lam, mu):
        return kernel.table(lam, mu)[0] * np.asarray(phi(-mu), dtype=complex)

    def image(lam):
        return integrate_pointwise(integrand, lam, path, lambda a: -a)

    return image


def kernel_consistency(lam: Sequence[complex], mu: Sequence[complex], tau: complex, sigma: complex, eta: complex) -> Dict[str, complex]:
    """
    Ratio of M (m=1) to the conjugated V-kernel
    alpha(lambda) alpha(mu) V(lambda, mu) theta(mu, sigma) theta(mu+2eta, sigma)/(theta(lambda) theta(lambda-2eta)).
    """
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    M = KernelM(1, tau, sigma, eta).table(lam, mu)
    V = KernelV(tau, sigma, eta).table(lam, mu)
    conj = (np.outer(alpha_gauss(lam, eta), alpha_gauss(mu, eta)) * V
            * (theta(mu, sigma) * theta(mu + 2 * eta, sigma))[None, :]
            / (theta(lam, tau) * theta(lam - 2 * eta, tau))[:, None])
    ratios = (M / conj).ravel()
    mean = complex(np.mean(ratios))
    return {"mean": mean, "spread": float(np.max(np.abs(ratios - mean)) / max(abs(mean), 1e-300))}

"""Small-eta expansion of the n=1, Lambda=2 heat equation and the differential KZB heat operator."""

import logging
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from core.exceptions import DomainError
from core.models import ExpansionReport
from stages.blocks.spaces import SectionClosure
from stages.integrals.contour import default_path, integrate_path
from stages.integrals.hyperfun import phase_product, split_quadrature, weight_values
from stages.integrals.shapovalov import q_single
from stages.special.phase import omega_tilde
from stages.special.theta import (
    dedekind_eta_log_derivative,
    theta,
    theta_derivative,
    theta_level,
    weierstrass_p,
)
from utils.numerics import (
    derivative,
    loglog_slope,
    parallel_map,
    polynomial_fit,
    richardson_checked,
    second_derivative,
)

logger = logging.getLogger(__name__)

DEFAULT_ETAS = tuple(-0.04j * 2.0 ** -k for k in range(4))
# Q_1^2 keeps a pole of size eta at mu = 0, |lambda| from the saddle: the series is asymptotic in |eta|/|lambda|^2.
FIT_ETAS = tuple(-0.01j * 2.0 ** -k for k in range(5))
DEFAULT_LAMBDAS = (0.21 + 0.07j, -0.33 + 0.11j, 0.47 - 0.05j, 0.12 + 0.26j)
TAU_STEP = 1e-4
LAMBDA_STEP = 1e-3

# (lambda, mu, eta) -> value
GaussianTest = Callable[[complex, np.ndarray, complex], np.ndarray]


def _check_eta(eta: complex):
    if complex(eta).imag >= 0:
        raise DomainError("the expansion runs along Im eta < 0")


# ---------------------------------------------------------------------- differential side


def kzb_heat_apply(kappa: int, v: SectionClosure, lam: complex, tau: complex, tolerance: float = 1e-6) -> complex:
    """2 pi i kappa d_tau v - d_lambda^2 v + 2 p(lambda, tau) v; equals c(tau) v on solutions."""
    d_tau, _ = richardson_checked(
        lambda h: derivative(lambda t: v(lam, t), tau, h, direction=1j),
        TAU_STEP, tolerance, label="d/dtau",
    )
    d2_lam = second_derivative(lambda x: v(x, tau), lam, LAMBDA_STEP)
    return complex(2j * np.pi * kappa * d_tau - d2_lam + 2 * weierstrass_p(lam, tau) * v(lam, tau))


def horizontal_test_family(tau: complex) -> Tuple[int, SectionClosure, complex]:
    """
    v = 1/theta(lambda, tau) at level kappa = -2.

    Returns:
        (kappa, v, expected remainder ratio 2 theta'''(0)/(3 theta'(0)))
    """
    ratio = 2 * theta_derivative(0.0, tau, order=3) / (3 * theta_derivative(0.0, tau, order=1))
    return -2, (lambda lam, t: 1.0 / theta(lam, t)), complex(ratio)


def heat_remainder_ratios(kappa: int, v: SectionClosure, tau: complex,
                          lambdas: Sequence[complex] = DEFAULT_LAMBDAS) -> np.ndarray:
    """kzb_heat_apply / v at each sample point."""
    return np.array([kzb_heat_apply(kappa, v, lam, tau) / v(lam, tau) for lam in lambdas])


# ---------------------------------------------------------------------- Gaussian asymptotics


def gaussian_integral(g: GaussianTest, lam: complex, eta: complex) -> complex:
    """(i/sqrt(4 i eta)) integral of e^{-i pi (lambda+mu)^2/4eta} g(lambda, -mu, eta) along mu = eta t - lambda."""
    _check_eta(eta)
    path = default_path(eta, -complex(lam), scale=1.0)
    normalization = 1j / np.sqrt(4j * complex(eta))
    value = integrate_path(
        lambda mu: np.exp(-1j * np.pi * (lam + mu) ** 2 / (4 * eta)) * g(lam, -mu, eta), path
    )
    return complex(normalization * value)


def gaussian_expansion(g: GaussianTest, lam: complex, eta: complex) -> complex:
    """g(lambda, lambda, 0) + eta ((1/i pi) d_mu^2 g + d_eta g) at mu = lambda, eta = 0."""
    lam = complex(lam)
    one = lambda mu, e: complex(np.asarray(g(lam, np.array([mu]), e))[0])
    d2_mu = second_derivative(lambda mu: one(mu, 0.0), lam, LAMBDA_STEP)
    d_eta = derivative(lambda e: one(lam, e), 0.0, 1e-5)
    return one(lam, 0.0) + eta * (d2_mu / (1j * np.pi) + d_eta)


def gaussian_asymptotics(g: GaussianTest, lam: complex, etas: Sequence[complex] = DEFAULT_ETAS) -> Dict[str, object]:
    """
    Remainders of the two-term expansion of the Gaussian integral along an eta sequence,
    and the slope of log|remainder| against log|eta|.
    """
    remainders = [abs(gaussian_integral(g, lam, eta) - gaussian_expansion(g, lam, eta)) for eta in etas]
    return {
        "etas": list(etas),
        "remainders": remainders,
        "slope": loglog_slope([abs(e) for e in etas], remainders),
    }


def default_gaussian_test(lam: complex, mu: np.ndarray, eta: complex) -> np.ndarray:
    mu = np.asarray(mu, dtype=complex)
    return np.cos(2 * mu + lam) * (1 + eta * mu) + 0.3 * eta * mu * mu


# ---------------------------------------------------------------------- heat equation for n = 1, Lambda = 2


def trial_section(kappa: int) -> SectionClosure:
    """v(lambda, tau) = theta(lambda, tau) theta_{1,kappa}(lambda, tau), independent of eta."""
    return lambda lam, tau: theta(lam, tau) * theta_level(1, kappa, lam, tau)


def hypergeometric_core(lam: complex, tau: complex, sigma: complex, eta: complex) -> Callable[[np.ndarray], np.ndarray]:
    """
    mu -> integral over gamma of the n=1, Lambda=2 integrand without e^{-pi i lambda mu/2eta},
    on the raised cycle plus 2 pi i times the residue at t = 2 eta.
    """
    t, w = split_quadrature(tau, sigma, eta)
    T = t.reshape(-1, 1)
    fixed = (weight_values((1,), T, (0j,), np.array([lam]), tau, (2.0,), eta)[0]
             * phase_product(T, (0j,), tau, sigma, (2.0,), eta) * w)

    def core(mu):
        mu = np.atleast_1d(np.asarray(mu, dtype=complex))
        return weight_values((1,), T, (0j,), mu, sigma, (2.0,), eta) @ fixed

    return core


def qkzb1_rhs(kappa: int, lam: complex, tau: complex, eta: complex, v: SectionClosure) -> complex:
    """
    -1/(4 pi sqrt(i eta)) integral of e^{-i pi (lambda+mu)^2/4eta} u_0(lambda, mu, tau, tau') Q_1^2(mu, tau') v(-mu, tau') d mu

    with tau' = tau - 2 kappa eta, along mu = eta t - lambda.
    """
    _check_eta(eta)
    lam, tau, eta = complex(lam), complex(tau), complex(eta)
    sigma = tau - 2 * kappa * eta
    core = hypergeometric_core(lam, tau, sigma, eta)
    path = default_path(eta, -lam, scale=1.0)

    def integrand(mu):
        gauss = np.exp(-1j * np.pi * (lam + mu) ** 2 / (4 * eta))
        return gauss * core(mu) * q_single(1, 2, mu, sigma, eta) * v(-mu, sigma)

    normalization = -1.0 / (4 * np.pi * np.sqrt(1j * eta))
    return complex(normalization * integrate_path(integrand, path))


def omega_tilde_limit(kappa: int, tau: complex, etas: Sequence[complex] = DEFAULT_ETAS) -> list:
    """|Omega~_{2eta}(2eta, tau, tau - 2 kappa eta) - 1| along the eta sequence."""
    return [abs(complex(omega_tilde(2 * e, 2 * e, tau, tau - 2 * kappa * e)) - 1.0) for e in etas]


def semiclassical_residual(kappa: int, tau: complex, lambdas: Sequence[complex] = DEFAULT_LAMBDAS,
                           etas: Sequence[complex] = FIT_ETAS) -> ExpansionReport:
    """
    Fit the heat-equation right-hand side as g0 + eta g1 + ... for v = theta theta_{1,kappa} and
    compare with v0 and with the KZB heat operator applied to v0/theta.
    """
    for eta in etas:
        _check_eta(eta)
    v = trial_section(kappa)
    lambdas = [complex(x) for x in lambdas]

    def samples(eta):
        return [qkzb1_rhs(kappa, lam, tau, eta, v) for lam in lambdas]

    table = np.array(parallel_map(samples, list(etas)))
    coeffs = np.array([polynomial_fit(etas, table[:, i], len(etas) - 1) for i in range(len(lambdas))])
    g0, g1 = coeffs[:, 0], coeffs[:, 1]

    w = lambda lam, t: theta_level(1, kappa, lam, t)
    c_values = []
    leading = 0.0
    for lam, a, b in zip(lambdas, g0, g1):
        v0 = v(lam, tau)
        leading = max(leading, abs(a - v0))
        w0 = w(lam, tau)
        d2 = second_derivative(lambda x: w(x, tau), lam, LAMBDA_STEP)
        dt = derivative(lambda t: w(lam, t), tau, TAU_STEP, direction=1j)
        operator = d2 / (1j * np.pi) - 2 * kappa * dt - (2 / (np.pi * 1j)) * weierstrass_p(lam, tau) * w0
        c_values.append(complex((b - theta(lam, tau) * operator) / v0))

    c = np.array(c_values)
    mean = np.mean(c)
    spread = float(np.max(np.abs(c - mean)) / max(1.0, abs(mean)))
    return ExpansionReport(
        eta_sequence=list(etas),
        lambdas=lambdas,
        leading_residual=float(leading),
        c_values=c_values,
        c_spread=spread,
        eta_function_value=2 * kappa * dedekind_eta_log_derivative(tau),
    )

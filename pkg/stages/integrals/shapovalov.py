"""Elliptic Shapovalov form: the weights Q_k, the diagonal form Q_I and the pairing Q_tau."""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from config import settings
from core.exceptions import DomainError
from core.models import HighestWeights, IntegrationPath
from stages.algebra.rmatrix import RMatrix, calibrated
from stages.algebra.weights import Index, WeightSpace, is_admissible
from stages.integrals.contour import default_path, integrate_path
from stages.special.theta import alpha_gauss, require_nonzero, theta, theta_prime

logger = logging.getLogger(__name__)

Pairable = Callable[[np.ndarray], np.ndarray]

# The product formula first vanishes at k = Lambda + 1; the text remark states k >= Lambda.
VANISHING_NOTE = "Q_k follows the product formula literally: Q_Lambda != 0, Q_k = 0 for k >= Lambda + 1"


@dataclass(frozen=True)
class ShapovalovWeight:
    value: complex
    k: int
    Lambda: float
    mu: complex
    tau: complex
    eta: complex


def q_single(k: int, Lambda: float, mu, tau: complex, eta: complex):
    """
    Q_k^Lambda(mu, tau) = (theta'(0)/theta(2eta))^k
        prod_{l=1}^k theta(2eta(Lambda+1-l)) theta(2eta l) / (theta(mu + 2eta(Lambda+1-k-l)) theta(mu - 2eta l)).

    Args:
        k: nonnegative integer
        Lambda: highest weight
        mu: scalar or array
        tau: modulus
        eta: deformation parameter

    Returns:
        Values with the shape of mu
    """
    if k < 0:
        raise DomainError("Q_k needs k >= 0")
    mu_arr = np.asarray(mu, dtype=complex)
    value = np.ones_like(mu_arr)
    if k:
        th2 = theta(2 * eta, tau)
        require_nonzero(th2, "theta(2eta)")
        value = value * (theta_prime(0.0, tau) / th2) ** k
    for l in range(1, k + 1):
        den = theta(mu_arr + 2 * eta * (Lambda + 1 - k - l), tau) * theta(mu_arr - 2 * eta * l, tau)
        require_nonzero(den, f"theta(mu+2eta(Lambda+1-k-l)) theta(mu-2eta l), l={l}")
        value = value * theta(2 * eta * (Lambda + 1 - l), tau) * theta(2 * eta * l, tau) / den
    return value if mu_arr.ndim else complex(value)


def q_weight(k: int, Lambda: float, mu: complex, tau: complex, eta: complex) -> ShapovalovWeight:
    return ShapovalovWeight(complex(q_single(k, Lambda, mu, tau, eta)), k, Lambda, mu, tau, eta)


def q_tensor(mu, tau: complex, weights: HighestWeights, eta: complex, finite: Optional[bool] = None) -> np.ndarray:
    """
    Diagonal of Q(mu, tau) on the zero-weight space,
    Q_I = prod_j Q^{Lambda_j}_{i_j}(mu + 2eta sum_{l<j}(Lambda_l - 2 i_l)).

    finite=False uses the Verma basis also for integer weights.

    Returns:
        (L, dim) array
    """
    space = WeightSpace(weights, finite=weights.is_integer if finite is None else finite)
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    out = np.ones((mu.size, space.dim), dtype=complex)
    for col, I in enumerate(space.basis):
        shift = 0.0
        for j, (i, L) in enumerate(zip(I, space.lambdas)):
            out[:, col] *= q_single(i, L, mu + 2 * eta * shift, tau, eta)
            shift += L - 2 * i
    return out


def pairing_path(eta: complex, epsilon: Optional[complex] = None) -> IntegrationPath:
    """The path mu = 2 eta t + epsilon, truncated where alpha has decayed."""
    return default_path(eta, settings.grid_epsilon if epsilon is None else epsilon, scale=2.0)


def shapovalov_pair(
    f: Pairable,
    g: Pairable,
    tau: complex,
    weights: HighestWeights,
    eta: complex,
    path: Optional[IntegrationPath] = None,
) -> complex:
    """
    Q_tau(f, g) = integral of sum_J Q_J(mu, tau) f_J(mu) g_J(-mu) alpha(mu) d mu along mu = 2 eta t + epsilon.

    f, g: callables mu (P,) -> (P, dim), e.g. GridFunction closures.

    Raises:
        DivergenceError: the integrand has not decayed at the truncation points
    """
    path = path or pairing_path(eta)

    def integrand(mu):
        return np.sum(q_tensor(mu, tau, weights, eta) * f(mu) * g(-mu), axis=1) * alpha_gauss(mu, eta)

    return complex(integrate_path(integrand, path))


def translation_residual(f: Pairable, g: Pairable, tau: complex, weights: HighestWeights, eta: complex,
                         steps: int = 1, epsilon: Optional[complex] = None) -> float:
    """Change of the pairing when the path offset moves by 2 eta * steps."""
    epsilon = settings.grid_epsilon if epsilon is None else epsilon
    base = shapovalov_pair(f, g, tau, weights, eta, pairing_path(eta, epsilon))
    moved = shapovalov_pair(f, g, tau, weights, eta, pairing_path(eta, epsilon + 2 * eta * steps))
    return abs(moved - base) / max(abs(base), 1e-300)


def lemma15_residual(Lambda: int, M: int, z: complex, mu, tau: complex, eta: complex,
                     rmatrix: Optional[RMatrix] = None) -> float:
    """
    Shapovalov symmetry of R_{Lambda,M} as a matrix identity on L_Lambda x L_M:

        D_L(mu) R(z, -mu) = (D_R(mu) R(z, mu + 2eta(h1 + h2)))^T

    with D_L = Q^Lambda(mu + 2eta h2) Q^M(mu), D_R = Q^Lambda(mu) Q^M(mu + 2eta h1), and the
    dynamical argument of the right-hand R taken at the total weight of each column.
    """
    rmatrix = rmatrix or calibrated(eta, tau)
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    d2 = M + 1
    size = (Lambda + 1) * d2
    a = np.arange(size) // d2
    b = np.arange(size) % d2
    h1 = Lambda - 2 * a
    h2 = M - 2 * b
    DL = np.empty((mu.size, size), dtype=complex)
    DR = np.empty_like(DL)
    for s in range(size):
        DL[:, s] = q_single(int(a[s]), Lambda, mu + 2 * eta * h2[s], tau, eta) * q_single(int(b[s]), M, mu, tau, eta)
        DR[:, s] = q_single(int(a[s]), Lambda, mu, tau, eta) * q_single(int(b[s]), M, mu + 2 * eta * h1[s], tau, eta)
    lhs = DL[:, :, None] * rmatrix.evaluate(Lambda, M, z, -mu, tau)
    total = h1 + h2
    shifted = np.empty((mu.size, size, size), dtype=complex)
    for w in np.unique(total):
        cols = np.nonzero(total == w)[0]
        shifted[:, :, cols] = rmatrix.evaluate(Lambda, M, z, mu + 2 * eta * w, tau)[:, :, cols]
    rhs = np.transpose(DR[:, :, None] * shifted, (0, 2, 1))
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))


def admissibility_mismatches(weights: HighestWeights, mu, tau: complex, eta: complex, rtol: float = 1e-10) -> List[Index]:
    """
    Verma zero-weight indices where Q_I(mu) != 0 disagrees with admissibility i_j <= Lambda_j.

    Q_I counts as nonzero above rtol times the largest |Q_J| at the same mu.
    """
    space = WeightSpace(weights, finite=False)
    values = np.abs(q_tensor(mu, tau, weights, eta, finite=False))
    scale = np.maximum(values.max(axis=1, keepdims=True), 1e-300)
    nonzero = (values > rtol * scale).all(axis=0)
    vanishing = (values <= rtol * scale).all(axis=0)
    mismatched = []
    for k, I in enumerate(space.basis):
        admissible = is_admissible(I, weights)
        if (admissible and not nonzero[k]) or (not admissible and not vanishing[k]):
            mismatched.append(tuple(I))
    if mismatched:
        logger.warning(f"Q_I and admissibility disagree at {mismatched}")
    return mismatched

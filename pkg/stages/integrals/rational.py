"""Heat operators at rational eta = 1/2N acting on the finite grid spaces F_N(epsilon)."""

import logging
from typing import Dict, Optional, Sequence

import numpy as np

from config import settings
from core.exceptions import DomainError, GridMismatchError
from core.models import HighestWeights, QkzbConfig
from stages.algebra.qkzb import GridFunction, QkzbOperators
from stages.algebra.rmatrix import RMatrix
from stages.integrals.hyperfun import HypergeometricFunction
from stages.integrals.shapovalov import q_tensor
from stages.special.theta import alpha_gauss
from utils.numerics import relative_residual

logger = logging.getLogger(__name__)


def gauss_sum(N: int) -> complex:
    """S(N) = sum_{k=0}^{2N-1} e^{-pi i k^2 / 2N}."""
    if N < 1:
        raise DomainError("the Gauss sum needs N >= 1")
    k = np.arange(2 * N)
    return complex(np.sum(np.exp(-np.pi * 1j * k * k / (2 * N))))


def rational_constant(N: int) -> complex:
    """C_N = i e^{2 pi i/N} / S(N)."""
    return 1j * np.exp(2j * np.pi / N) / gauss_sum(N)


def _check_rational(weights: HighestWeights, N: int) -> float:
    if not weights.is_integer:
        raise DomainError("rational heat operators need integer weights")
    if N <= max(weights.lambdas):
        raise GridMismatchError(f"N={N} must exceed every highest weight")
    return 1.0 / (2 * N)


class RationalHeatOperator:
    """
    T_N(z, tau, p) v(lambda) = alpha(lambda) sum_{k<2N} sum_J u_IJ(lambda, mu_k, tau, tau+p)
        Q_J(mu_k, tau+p) v_J(-mu_k) alpha(mu_k),  mu_k = -epsilon + k/N,  eta = 1/2N.
    """

    def __init__(self, zs: Sequence[complex], tau: complex, p: complex, weights: HighestWeights, N: int,
                 epsilon: Optional[complex] = None):
        self.eta = _check_rational(weights, N)
        self.N = N
        self.epsilon = complex(settings.grid_epsilon if epsilon is None else epsilon)
        self.zs = tuple(complex(z) for z in zs)
        self.tau, self.p = complex(tau), complex(p)
        self.weights = weights
        self.kernel = HypergeometricFunction(self.zs, self.tau, self.tau + self.p, weights, self.eta)
        self.dim = self.kernel.space.dim
        self.mu = -self.epsilon + np.arange(2 * N) / N

    def shifted(self, j: int, step: complex) -> "RationalHeatOperator":
        zs = list(self.zs)
        zs[j] += step
        return RationalHeatOperator(zs, self.tau, self.p, self.weights, self.N, self.epsilon)

    def coefficients(self, lam) -> np.ndarray:
        """(L, 2N, I, J) coefficients of v_J at grid position (-k mod 2N)."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        table = self.kernel.table(lam, self.mu)
        weight = q_tensor(self.mu, self.tau + self.p, self.weights, self.eta) * alpha_gauss(self.mu, self.eta)[:, None]
        return alpha_gauss(lam, self.eta)[:, None, None, None] * table * weight[None, :, None, :]

    def values(self, lam, v: np.ndarray) -> np.ndarray:
        """T_N v at arbitrary lambda for grid values v of shape (2N, dim)."""
        coeffs = self.coefficients(lam)
        reflected = v[(-np.arange(2 * self.N)) % (2 * self.N)]
        return np.einsum("lkIJ,kJ->lI", coeffs, reflected)

    def matrix(self) -> np.ndarray:
        """Dense (2N dim) x (2N dim) matrix on F_N(epsilon), position k*dim + I."""
        N, dim = self.N, self.dim
        lam = self.epsilon + np.arange(2 * N) / N
        coeffs = self.coefficients(lam)
        out = np.zeros((2 * N * dim, 2 * N * dim), dtype=complex)
        for a in range(2 * N):
            for k in range(2 * N):
                b = (-k) % (2 * N)
                out[a * dim:(a + 1) * dim, b * dim:(b + 1) * dim] += coeffs[a, k]
        return out

    def apply(self, v: GridFunction) -> GridFunction:
        if not v.is_grid or v.N != self.N:
            raise GridMismatchError("T_N acts on grid functions of the same N")
        if abs(v.epsilon - self.epsilon) > 1e-12:
            raise GridMismatchError("grid offsets differ")
        return GridFunction.on_grid(self.weights, self.matrix() @ v.vector(), self.N, self.epsilon)


def heat_TN_matrix(zs, tau, p, N: int, weights: HighestWeights, epsilon: Optional[complex] = None) -> np.ndarray:
    return RationalHeatOperator(zs, tau, p, weights, N, epsilon).matrix()


def heat_TN(zs, tau, p, kappa_data, weights: HighestWeights, eta, v: GridFunction) -> GridFunction:
    N, epsilon = kappa_data
    if abs(2 * N * complex(eta) - 1) > 1e-12:
        raise GridMismatchError(f"T_N needs 2 N eta = 1, got N={N}, eta={eta}")
    return RationalHeatOperator(zs, tau, p, weights, N, epsilon).apply(v)


def periodicity_residual(operator: RationalHeatOperator, v: np.ndarray) -> float:
    """T_N v on epsilon + k/N for k < 4N: the two halves must agree."""
    N = operator.N
    lam = operator.epsilon + np.arange(4 * N) / N
    values = operator.values(lam, np.asarray(v, dtype=complex).reshape(2 * N, operator.dim))
    return relative_residual(values[2 * N:], values[:2 * N])


def compatibility_residual(j: int, zs, tau, p, N: int, weights: HighestWeights, epsilon: Optional[complex] = None,
                           rmatrix: Optional[RMatrix] = None) -> float:
    """T_N(z + p d_j, tau, p) K_j(z, tau+p, p) = K_j(z, tau, p) T_N(z, tau, p) as matrices on F_N(epsilon)."""
    T = RationalHeatOperator(zs, tau, p, weights, N, epsilon)
    ops = QkzbOperators(weights, T.eta, rmatrix)
    base = QkzbConfig(zs=T.zs, tau=tau, p=p, eta=T.eta, weights=weights)
    lifted = base.model_copy(update={"tau": complex(tau) + complex(p)})
    lhs = T.shifted(j, p).matrix() @ ops.k_matrix(j, lifted, N, T.epsilon)
    rhs = ops.k_matrix(j, base, N, T.epsilon) @ T.matrix()
    return relative_residual(lhs, rhs)


def rational_conjecture_residual(tau: complex, p: complex, N: int = 3, epsilon: Optional[complex] = None,
                                 z: complex = 0j, samples: Sequence[tuple] = ((0, 0), (1, 2), (3, 5))) -> Dict[str, float]:
    """
    For n=1, Lambda=2: u(lambda, nu, tau, p) against
    C_N alpha(lambda) alpha(nu) sum_k Q(mu_k, tau+p) u(lambda, mu_k, tau, tau+p) u(-mu_k, nu, tau+p, p) alpha(mu_k)
    at lambda = epsilon + a/N, nu = b/N for the sample pairs (a, b).
    """
    weights = HighestWeights(lambdas=(2.0,))
    eta = _check_rational(weights, N)
    epsilon = complex(settings.grid_epsilon if epsilon is None else epsilon)
    mu = -epsilon + np.arange(2 * N) / N
    first = HypergeometricFunction((z,), tau, tau + p, weights, eta)
    second = HypergeometricFunction((z,), tau + p, p, weights, eta)
    direct = HypergeometricFunction((z,), tau, p, weights, eta)
    weight = q_tensor(mu, tau + p, weights, eta)[:, 0] * alpha_gauss(mu, eta)
    constant = rational_constant(N)
    worst = 0.0
    for a, b in samples:
        lam = epsilon + a / N
        nu = b / N
        left = first.table(lam, mu)[0, :, 0, 0]
        right = second.table(-mu, nu)[:, 0, 0, 0]
        composed = constant * alpha_gauss(lam, eta) * alpha_gauss(nu, eta) * np.sum(weight * left * right)
        value = direct.table(lam, nu)[0, 0, 0, 0]
        worst = max(worst, relative_residual(composed, value))
    return {"residual": worst, "constant": constant}


def u_hat_regularity(N: int, zs, tau, p, weights: HighestWeights, lam, mu, delta: float = 1e-6) -> float:
    """Relative variation of the u table between 2 eta = 1/N - delta and 1/N + delta."""
    _check_rational(weights, N)
    below = HypergeometricFunction(zs, tau, p, weights, (1.0 / N - delta) / 2).table(lam, mu)
    above = HypergeometricFunction(zs, tau, p, weights, (1.0 / N + delta) / 2).table(lam, mu)
    return relative_residual(above, below)

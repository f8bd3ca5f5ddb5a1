"""Heat operators T, T^vee, their compatibility with the qKZB operators, and the composed kernel U."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import DomainError
from core.models import HighestWeights, IntegrationPath
from stages.algebra.qkzb import Closure, GridFunction, QkzbOperators, d_multiplier
from stages.algebra.rmatrix import RMatrix
from stages.algebra.weights import WeightSpace
from stages.integrals.contour import integrate_path, integrate_pointwise
from stages.integrals.hyperfun import HyperValue, HypergeometricFunction
from stages.integrals.shapovalov import pairing_path, q_tensor, shapovalov_pair
from stages.special.theta import alpha_gauss
from utils.numerics import relative_residual

logger = logging.getLogger(__name__)


def heat_constant(weights: HighestWeights, eta: complex) -> complex:
    """-1/(4 pi sqrt(i eta)) for total weight 2, 1 otherwise (principal square root)."""
    if weights.m == 1:
        return -1.0 / (4 * np.pi * np.sqrt(1j * complex(eta)))
    return 1.0 + 0j


def conjecture_constant(eta: complex) -> complex:
    """C = -e^{4 pi i eta}/(2 pi sqrt(4 i eta)) in u = C U, the continuum form of u = C_N sum_k (...)."""
    eta = complex(eta)
    return -np.exp(4j * np.pi * eta) / (2 * np.pi * np.sqrt(4j * eta))


def exponential_panel(space: WeightSpace, exponents: Sequence[float] = (0.0, 0.35)) -> List[Closure]:
    """Test functions e_I exp(a lambda)."""
    panel = []
    for I in range(space.dim):
        for a in exponents:
            def f(x, I=I, a=a):
                x = np.atleast_1d(np.asarray(x, dtype=complex))
                out = np.zeros((x.size, space.dim), dtype=complex)
                out[:, I] = np.exp(a * x)
                return out
            panel.append(f)
    return panel


class HeatOperator:
    """
    T(z, tau, p) v(lambda)_I = c alpha(lambda) integral sum_J u_IJ(z, lambda, mu, tau, tau+p)
        Q_J(mu, tau+p) v_J(-mu) alpha(mu) d mu,

    or, mirrored, T^vee(z, p, tau) v(mu)_J = c alpha(mu) integral sum_I Q_I(lambda, tau+p) v_I(lambda)
        u_IJ(z, -lambda, mu, tau+p, p) alpha(lambda) d lambda.
    """

    def __init__(
        self,
        zs: Sequence[complex],
        tau: complex,
        p: complex,
        weights: HighestWeights,
        eta: complex,
        mirror: bool = False,
        path: Optional[IntegrationPath] = None,
        saddle: bool = False,
    ):
        self.zs = tuple(complex(z) for z in zs)
        self.tau, self.p, self.eta = complex(tau), complex(p), complex(eta)
        self.weights = weights
        self.mirror = mirror
        # saddle: the path passes through the Gaussian peak of each image point; needs Q v entire
        self.saddle = saddle
        self.space = WeightSpace(weights, finite=weights.is_integer)
        self.path = path or pairing_path(eta)
        self.constant = heat_constant(weights, eta)
        if mirror:
            self.kernel = HypergeometricFunction(self.zs, self.tau + self.p, self.p, weights, eta)
        else:
            self.kernel = HypergeometricFunction(self.zs, self.tau, self.tau + self.p, weights, eta)

    def shifted(self, j: int, step: complex) -> "HeatOperator":
        zs = list(self.zs)
        zs[j] += step
        return HeatOperator(zs, self.tau, self.p, self.weights, self.eta, self.mirror, self.path, self.saddle)

    def closure(self, v: Closure) -> Closure:
        modulus = self.tau + self.p

        def integrand(x, y):
            weight = q_tensor(y, modulus, self.weights, self.eta) * alpha_gauss(y, self.eta)[:, None]
            if self.mirror:
                # u(-lambda, mu): (P, L, I, J)
                table = self.kernel.table(-y, x)
                return np.einsum("plIJ,pI->plJ", table, weight * v(y))
            table = self.kernel.table(x, y)
            return np.einsum("lpIJ,pJ->plI", table, weight * v(-y))

        def image(x):
            x = np.atleast_1d(np.asarray(x, dtype=complex))
            if self.saddle:
                sign = 1 if self.mirror else -1
                values = integrate_pointwise(lambda a, y: integrand(np.array([a]), y)[:, 0], x, self.path,
                                             lambda a: sign * a)
            else:
                values = integrate_path(lambda y: integrand(x, y), self.path)
            return self.constant * alpha_gauss(x, self.eta)[:, None] * values

        return image

    def apply(self, v) -> GridFunction:
        return GridFunction.from_closure(self.weights, self.eta, self.closure(v))


def heat_T(zs, tau, p, weights: HighestWeights, eta, v) -> GridFunction:
    return HeatOperator(zs, tau, p, weights, eta).apply(v)


def heat_T_vee(zs, p, tau, weights: HighestWeights, eta, v) -> GridFunction:
    return HeatOperator(zs, tau, p, weights, eta, mirror=True).apply(v)


def theorem1_residual(j: int, zs, tau, p, weights: HighestWeights, eta, lam,
                      panel: Optional[List[Closure]] = None, rmatrix: Optional[RMatrix] = None) -> float:
    """T(z + p d_j, tau, p) K_j(z, tau+p, p) v against K_j(z, tau, p) T(z, tau, p) v over a panel of v."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    ops = QkzbOperators(weights, eta, rmatrix)
    T = HeatOperator(zs, tau, p, weights, eta)
    T_moved = T.shifted(j, p)
    worst = 0.0
    for v in panel or exponential_panel(ops.space):
        lhs = T_moved.closure(ops._operator_closure(j, False, T.zs, tau + p, p, v))(lam)
        rhs = ops._operator_closure(j, False, T.zs, tau, p, T.closure(v))(lam)
        worst = max(worst, relative_residual(lhs, rhs))
    return worst


def theorem1_vee_residual(j: int, zs, tau, p, weights: HighestWeights, eta, mu,
                          panel: Optional[List[Closure]] = None, rmatrix: Optional[RMatrix] = None) -> float:
    """T^vee(z + tau d_j, p, tau) K^vee_j(z, p+tau, tau) v against K^vee_j(z, p, tau) T^vee(z, p, tau) v."""
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    ops = QkzbOperators(weights, eta, rmatrix)
    T = HeatOperator(zs, tau, p, weights, eta, mirror=True)
    T_moved = T.shifted(j, tau)
    worst = 0.0
    for v in panel or exponential_panel(ops.space):
        lhs = T_moved.closure(ops._operator_closure(j, True, T.zs, p + tau, tau, v))(mu)
        rhs = ops._operator_closure(j, True, T.zs, p, tau, T.closure(v))(mu)
        worst = max(worst, relative_residual(lhs, rhs))
    return worst


def lemma17_residual(j: int, which: str, zs, tau, p, weights: HighestWeights, eta,
                     panel: Optional[List[Closure]] = None, rmatrix: Optional[RMatrix] = None) -> float:
    """
    Adjointness of the qKZB operators under the pairing with modulus tau+p, C_j = e^{pi i eta Lambda_j sum_{l!=j} Lambda_l}:

    which="K":     Q(f, K_j(z, tau+p, p) g) = C_j Q(D_j^{-1} K^vee_j(z + p d_j, tau+p, tau) f, g)
    which="K_vee": Q(K^vee_j(z, tau+p, tau) f, g) = C_j Q(f, (D^vee_j)^{-1} K_j(z + tau d_j, tau+p, p) g)
    """
    ops = QkzbOperators(weights, eta, rmatrix)
    zs = tuple(complex(z) for z in zs)
    L = ops.space.lambdas
    C = np.exp(np.pi * 1j * eta * L[j] * (sum(L) - L[j]))
    modulus = tau + p
    panel = panel or exponential_panel(ops.space, (0.0, 0.3))
    moved_p = list(zs)
    moved_p[j] += p
    moved_tau = list(zs)
    moved_tau[j] += tau
    worst = 0.0
    for f in panel:
        for g in panel:
            if which == "K":
                Kg = ops._operator_closure(j, False, zs, modulus, p, g)
                Kf = ops._operator_closure(j, True, moved_p, modulus, tau, f)
                lhs = shapovalov_pair(f, Kg, modulus, weights, eta)
                moved_f = lambda x, Kf=Kf: Kf(x) / d_multiplier(j, x, "D", weights, eta)
                rhs = C * shapovalov_pair(moved_f, g, modulus, weights, eta)
            elif which == "K_vee":
                Kf = ops._operator_closure(j, True, zs, modulus, tau, f)
                Kg = ops._operator_closure(j, False, moved_tau, modulus, p, g)
                lhs = shapovalov_pair(Kf, g, modulus, weights, eta)
                moved_g = lambda x, Kg=Kg: Kg(x) / d_multiplier(j, x, "D_vee", weights, eta)
                rhs = C * shapovalov_pair(f, moved_g, modulus, weights, eta)
            else:
                raise DomainError(f"unknown identity {which}")
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst


class ComposedKernel:
    """
    U_IK(lambda, nu) = alpha(lambda) alpha(nu) integral sum_J u_IJ(lambda, mu, tau, tau+p)
        Q_J(mu, tau+p) u_JK(-mu, nu, tau+p, p) alpha(mu) d mu.

    Exposes the table interface of HypergeometricFunction so the same system residuals apply.
    """

    def __init__(self, zs, tau, p, weights: HighestWeights, eta, path: Optional[IntegrationPath] = None):
        self.zs = tuple(complex(z) for z in zs)
        self.tau, self.p, self.eta = complex(tau), complex(p), complex(eta)
        self.weights = weights
        self.space = WeightSpace(weights, finite=weights.is_integer)
        self.path = path or pairing_path(eta)
        self.first = HypergeometricFunction(self.zs, self.tau, self.tau + self.p, weights, eta)
        self.second = HypergeometricFunction(self.zs, self.tau + self.p, self.p, weights, eta)

    def shifted(self, j: int, step: complex) -> "ComposedKernel":
        zs = list(self.zs)
        zs[j] += step
        return ComposedKernel(zs, self.tau, self.p, self.weights, self.eta, self.path)

    def table(self, lam, nu) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        nu = np.atleast_1d(np.asarray(nu, dtype=complex))
        modulus = self.tau + self.p

        def integrand(mu):
            left = self.first.table(lam, mu)                  # (La, P, I, J)
            right = self.second.table(-mu, nu)                # (P, Lb, J, K)
            weight = q_tensor(mu, modulus, self.weights, self.eta) * alpha_gauss(mu, self.eta)[:, None]
            return np.einsum("apIJ,pJ,pbJK->pabIK", left, weight, right)

        core = integrate_path(integrand, self.path)
        scale = np.outer(alpha_gauss(lam, self.eta), alpha_gauss(nu, self.eta))
        return scale[:, :, None, None] * core


def compose_U(zs, lam, nu, tau, p, weights: HighestWeights, eta) -> HyperValue:
    kernel = ComposedKernel(zs, tau, p, weights, eta)
    tensor = kernel.table(lam, nu)[0, 0]
    return HyperValue(tensor=tensor, basis=list(kernel.space.basis), zs=kernel.zs, lam=lam, mu=nu,
                      tau=complex(tau), p=complex(p), provenance={"kernel": "composed"})


def conjecture_ratio(zs, samples: Sequence[Tuple[complex, complex]], tau, p, weights: HighestWeights, eta) -> Dict[str, object]:
    """
    Ratios U/u over (lambda, nu) samples, their relative spread, and the expected ratio 1/C.
    """
    kernel = ComposedKernel(zs, tau, p, weights, eta)
    direct = HypergeometricFunction(kernel.zs, tau, p, weights, eta)
    ratios = []
    for lam, nu in samples:
        U = kernel.table(lam, nu)[0, 0]
        u = direct.table(lam, nu)[0, 0]
        mask = np.abs(u) > 1e-8 * max(np.max(np.abs(u)), 1e-300)
        ratios.extend(list((U[mask] / u[mask]).ravel()))
    ratios = np.array(ratios)
    mean = complex(np.mean(ratios))
    spread = float(np.max(np.abs(ratios - mean)) / max(abs(mean), 1e-300))
    expected = 1.0 / conjecture_constant(eta)
    logger.info(f"U/u mean {mean:.6g}, spread {spread:.2e}, expected {expected:.6g}")
    return {
        "ratios": ratios,
        "mean": mean,
        "spread": spread,
        "expected": expected,
        "deviation": abs(mean - expected) / abs(expected),
    }

"""qKZB difference operators Gamma_j, K_j, K_j^vee and the diagonal multipliers D_j, D_j^vee."""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from core.exceptions import DomainError, GridMismatchError
from core.models import HighestWeights, QkzbConfig
from stages.algebra.rmatrix import RMatrix, calibrated, embed_pair
from stages.algebra.weights import WeightSpace
from stages.special.theta import alpha_gauss
from utils.io import matrix_from_json, matrix_to_json
from utils.numerics import relative_residual

logger = logging.getLogger(__name__)

Closure = Callable[[np.ndarray], np.ndarray]
Factor = Tuple[int, complex, Tuple[int, ...]]


def _grid_step(eta: complex, N: int) -> None:
    if abs(2 * N * eta - 1) > 1e-12:
        raise GridMismatchError(f"grid F_N needs 2 N eta = 1, got N={N}, eta={eta}")


class GridFunction:
    """
    Zero-weight valued function of lambda.

    Either a closure lam -> (L, dim) array, or samples on the grid
    lam_k = epsilon + k/N, k = 0..2N-1, extended 2-periodically.
    """

    def __init__(
        self,
        weights: HighestWeights,
        eta: complex,
        closure: Optional[Closure] = None,
        values: Optional[np.ndarray] = None,
        N: Optional[int] = None,
        epsilon: Optional[complex] = None,
    ):
        if (closure is None) == (values is None):
            raise DomainError("a grid function needs exactly one of closure or values")
        self.weights = weights
        self.eta = complex(eta)
        self.space = WeightSpace(weights)
        self.closure = closure
        self.N = N
        self.epsilon = complex(settings.grid_epsilon if epsilon is None else epsilon)
        if values is not None:
            if N is None:
                raise DomainError("grid values need N")
            _grid_step(self.eta, N)
            values = np.asarray(values, dtype=complex).reshape(2 * N, self.space.dim)
        self.values = values

    @classmethod
    def from_closure(cls, weights: HighestWeights, eta: complex, fn: Closure) -> "GridFunction":
        return cls(weights, eta, closure=fn)

    @classmethod
    def on_grid(cls, weights: HighestWeights, values, N: int, epsilon: Optional[complex] = None) -> "GridFunction":
        return cls(weights, 1 / (2 * N), values=values, N=N, epsilon=epsilon)

    @property
    def is_grid(self) -> bool:
        return self.values is not None

    def grid_points(self) -> np.ndarray:
        if not self.is_grid:
            raise DomainError("closure functions have no grid")
        return self.epsilon + np.arange(2 * self.N) / self.N

    def vector(self) -> np.ndarray:
        """Flat grid values, position k*dim + I."""
        return self.values.ravel()

    def __call__(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        if not self.is_grid:
            return np.asarray(self.closure(lam), dtype=complex).reshape(lam.size, self.space.dim)
        position = (lam - self.epsilon) * self.N
        k = np.round(position.real).astype(int)
        if np.max(np.abs(position - k)) > 1e-9:
            raise GridMismatchError("evaluation point is off the grid")
        return self.values[k % (2 * self.N)]

    def to_json(self) -> dict:
        if not self.is_grid:
            raise DomainError("only grid functions are serializable")
        return {
            "weights": list(self.weights.lambdas),
            "N": self.N,
            "epsilon": [self.epsilon.real, self.epsilon.imag],
            "values": matrix_to_json(self.values),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GridFunction":
        return cls.on_grid(
            HighestWeights(lambdas=tuple(data["weights"])),
            matrix_from_json(data["values"]),
            int(data["N"]),
            complex(*data["epsilon"]),
        )


def d_multiplier(j: int, x, which: str, weights: HighestWeights, eta: complex) -> np.ndarray:
    """
    Diagonal of D_j(mu) (which="D") or D_j^vee(lambda) (which="D_vee") on V[0].

    Args:
        j: 0-based slot
        x: mu or lambda (scalar or array)
        which: "D" or "D_vee"
        weights: highest weights
        eta: deformation parameter

    Returns:
        (L, dim) array of diagonal entries
    """
    space = WeightSpace(weights, finite=weights.is_integer)
    n = space.n
    x = np.atleast_1d(np.asarray(x, dtype=complex))[:, None]
    L = space.lambdas
    phase = L[j] * (sum(L[:j]) - sum(L[j + 1:]))
    if which == "D":
        num = space.weight_sum(range(j + 1, n))
        den = space.weight_sum(range(j, n))
        sign = 1
    elif which == "D_vee":
        num = space.weight_sum(range(j))
        den = space.weight_sum(range(j + 1))
        sign = -1
    else:
        raise DomainError(f"unknown multiplier {which}")
    ratio = alpha_gauss(x - 2 * eta * num, eta) / alpha_gauss(x - 2 * eta * den, eta)
    return ratio * np.exp(sign * np.pi * 1j * eta * phase)


class QkzbOperators:
    """K_j and K_j^vee for a fixed set of weights and eta, as closures or dense grid matrices."""

    def __init__(self, weights: HighestWeights, eta: complex, rmatrix: Optional[RMatrix] = None):
        if not weights.is_integer:
            raise DomainError("qKZB operators are implemented for integer weights")
        self.weights = weights
        self.eta = complex(eta)
        self.space = WeightSpace(weights)
        self.rmatrix = rmatrix or calibrated(eta)

    @classmethod
    def for_config(cls, config: QkzbConfig, rmatrix: Optional[RMatrix] = None) -> "QkzbOperators":
        return cls(config.weights, config.eta, rmatrix)

    # ------------------------------------------------------------------ building blocks

    def _factors(self, j: int, mirror: bool, zs: Sequence[complex], step: complex) -> Tuple[List[Factor], List[Factor]]:
        """Left and right R-factor lists (slot k, spectral argument, shift slots)."""
        n = self.space.n
        left, right = [], []
        if not mirror:
            for k in range(j - 1, -1, -1):
                left.append((k, zs[j] - zs[k] + step, tuple(range(k))))
            for k in range(n - 1, j, -1):
                right.append((k, zs[j] - zs[k], tuple(l for l in range(k) if l != j)))
        else:
            for k in range(j + 1, n):
                left.append((k, zs[j] - zs[k] + step, tuple(range(k + 1, n))))
            for k in range(j):
                right.append((k, zs[j] - zs[k], tuple(l for l in range(k + 1, n) if l != j)))
        return left, right

    def _chain(self, j: int, factors: List[Factor], lam: np.ndarray, modulus: complex) -> np.ndarray:
        """Pointwise product of the R-factors, (L, dim, dim)."""
        space = self.space
        caps = [int(round(x)) for x in space.lambdas]
        out = np.broadcast_to(np.eye(space.dim, dtype=complex), (lam.size, space.dim, space.dim)).copy()
        for k, z, shift_slots in factors:
            pair = embed_pair(
                space.basis, space.index, j, k, (caps[j], caps[k]),
                space.weight_sum(shift_slots), self.eta,
                lambda lam_s, z=z, k=k: self.rmatrix.evaluate(caps[j], caps[k], z, lam_s, modulus),
                lam,
            )
            out = out @ pair
        return out

    def _shifts(self, j: int) -> np.ndarray:
        return self.space.h[j]

    def gamma_shift(self, j: int, f: GridFunction) -> GridFunction:
        """(Gamma_j f)(lambda) = f(lambda - 2 eta mu) on components with h^{(j)} = mu."""
        mu = self._shifts(j)
        if f.is_grid:
            _grid_step(self.eta, f.N)
            steps = np.round(mu).astype(int)
            if np.max(np.abs(mu - steps)) > 1e-12:
                raise GridMismatchError("non-integer slot weight on the grid")
            out = np.empty_like(f.values)
            k = np.arange(2 * f.N)
            for I, s in enumerate(steps):
                out[:, I] = f.values[(k - s) % (2 * f.N), I]
            return GridFunction.on_grid(f.weights, out, f.N, f.epsilon)

        def shifted(lam):
            lam = np.atleast_1d(np.asarray(lam, dtype=complex))
            out = np.empty((lam.size, self.space.dim), dtype=complex)
            for I, s in enumerate(mu):
                out[:, I] = f(lam - 2 * self.eta * s)[:, I]
            return out

        return GridFunction.from_closure(f.weights, self.eta, shifted)

    def _operator_closure(self, j: int, mirror: bool, zs, modulus: complex, step: complex, f: Closure) -> Closure:
        left, right = self._factors(j, mirror, zs, step)
        mu = self._shifts(j)

        def image(lam):
            lam = np.atleast_1d(np.asarray(lam, dtype=complex))
            h = np.empty((lam.size, self.space.dim), dtype=complex)
            for s in np.unique(mu):
                cols = np.nonzero(mu == s)[0]
                moved = lam - 2 * self.eta * s
                inner = np.einsum("lab,lb->la", self._chain(j, right, moved, modulus), f(moved))
                h[:, cols] = inner[:, cols]
            return np.einsum("lab,lb->la", self._chain(j, left, lam, modulus), h)

        return image

    def _operator_matrix(self, j: int, mirror: bool, zs, modulus: complex, step: complex, N: int, epsilon: complex) -> np.ndarray:
        _grid_step(self.eta, N)
        dim = self.space.dim
        lam = epsilon + np.arange(2 * N) / N
        left, right = self._factors(j, mirror, zs, step)
        A_left = self._chain(j, left, lam, modulus)
        A_right = self._chain(j, right, lam, modulus)
        gamma = np.zeros((2 * N * dim, 2 * N * dim))
        steps = np.round(self._shifts(j)).astype(int)
        for k in range(2 * N):
            for I, s in enumerate(steps):
                gamma[k * dim + I, ((k - s) % (2 * N)) * dim + I] = 1.0
        block_left = np.zeros((2 * N * dim, 2 * N * dim), dtype=complex)
        block_right = np.zeros_like(block_left)
        for k in range(2 * N):
            block_left[k * dim:(k + 1) * dim, k * dim:(k + 1) * dim] = A_left[k]
            block_right[k * dim:(k + 1) * dim, k * dim:(k + 1) * dim] = A_right[k]
        return block_left @ gamma @ block_right

    # ------------------------------------------------------------------ public operators

    def apply_K(self, j: int, config: QkzbConfig, f: GridFunction) -> GridFunction:
        """K_j(z, tau, p) f: R-matrices of modulus config.tau, step config.p."""
        return self._apply(j, False, config.zs, config.tau, config.p, f)

    def apply_K_vee(self, j: int, config: QkzbConfig, f: GridFunction) -> GridFunction:
        """K_j^vee(z, p, tau) f: R-matrices of modulus config.p, step config.tau."""
        return self._apply(j, True, config.zs, config.p, config.tau, f)

    def _apply(self, j, mirror, zs, modulus, step, f: GridFunction) -> GridFunction:
        if f.is_grid:
            matrix = self._operator_matrix(j, mirror, zs, modulus, step, f.N, f.epsilon)
            return GridFunction.on_grid(f.weights, matrix @ f.vector(), f.N, f.epsilon)
        return GridFunction.from_closure(f.weights, self.eta, self._operator_closure(j, mirror, zs, modulus, step, f))

    def k_matrix(self, j: int, config: QkzbConfig, N: int, epsilon: Optional[complex] = None) -> np.ndarray:
        """Dense matrix of K_j on F_N(epsilon), block k*dim + I."""
        epsilon = settings.grid_epsilon if epsilon is None else epsilon
        return self._operator_matrix(j, False, config.zs, config.tau, config.p, N, epsilon)

    def k_vee_matrix(self, j: int, config: QkzbConfig, N: int, epsilon: Optional[complex] = None) -> np.ndarray:
        epsilon = settings.grid_epsilon if epsilon is None else epsilon
        return self._operator_matrix(j, True, config.zs, config.p, config.tau, N, epsilon)

    # ------------------------------------------------------------------ identities

    def compatibility_residual(self, j: int, l: int, config: QkzbConfig, N: int, mirror: bool = False,
                               epsilon: Optional[complex] = None) -> float:
        """
        K_j(z + p d_l) K_l(z) - K_l(z + p d_j) K_j(z) on F_N (or the K^vee analogue with step tau).
        """
        build = self.k_vee_matrix if mirror else self.k_matrix
        step = config.tau if mirror else config.p
        lhs = build(j, config.shifted(l, step), N, epsilon) @ build(l, config, N, epsilon)
        rhs = build(l, config.shifted(j, step), N, epsilon) @ build(j, config, N, epsilon)
        return relative_residual(lhs, rhs)

    def mirror_residual(self, i: int, config: QkzbConfig, N: int, epsilon: Optional[complex] = None) -> float:
        """K^vee_i(z, p, tau; Lambda) - P^{-1} K_{n+1-i}(z^vee, p, tau; Lambda^vee) P."""
        n = self.space.n
        mirrored = QkzbConfig(
            zs=tuple(reversed(config.zs)), tau=config.p, p=config.tau,
            eta=config.eta, weights=config.weights.reversed(),
        )
        other = QkzbOperators(mirrored.weights, self.eta, self.rmatrix)
        P = np.kron(np.eye(2 * N), self.space.flip_matrix())
        lhs = self.k_vee_matrix(i, config, N, epsilon)
        rhs = P.T @ other.k_matrix(n - 1 - i, mirrored, N, epsilon) @ P
        return relative_residual(lhs, rhs)

    def inverse_residual(self, j: int, config: QkzbConfig, N: int, epsilon: Optional[complex] = None) -> float:
        K = self.k_matrix(j, config, N, epsilon)
        return relative_residual(np.linalg.inv(K) @ K, np.eye(K.shape[0]))

    def lemma16_residual(self, j: int, config: QkzbConfig, lam, which: str = "K", exponents: Sequence[float] = (0.0, 0.7, -1.3)) -> float:
        """
        Shift-of-step identities with alpha conjugation, on test functions e_I exp(a lambda):

        alpha (D_j^vee)^{-1} K_j(z, tau, p + tau) = K_j(z, tau, p) alpha C_j^{-1}
        alpha D_j^{-1} K^vee_j(z, p, tau + p) = K^vee_j(z, p, tau) alpha C_j^{-1}
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        eta, tau, p = self.eta, config.tau, config.p
        L = self.space.lambdas
        factor = np.exp(-np.pi * 1j * eta * L[j] * (sum(L) - L[j]))
        worst = 0.0
        for a in exponents:
            for I in range(self.space.dim):
                def f(x, a=a, I=I):
                    out = np.zeros((np.size(x), self.space.dim), dtype=complex)
                    out[:, I] = np.exp(a * np.asarray(x))
                    return out

                def alpha_f(x, f=f):
                    return alpha_gauss(np.asarray(x), eta)[:, None] * f(x)

                if which == "K":
                    moved = self._operator_closure(j, False, config.zs, tau, p + tau, f)(lam)
                    lhs = alpha_gauss(lam, eta)[:, None] * moved / d_multiplier(j, lam, "D_vee", self.weights, eta)
                    rhs = self._operator_closure(j, False, config.zs, tau, p, alpha_f)(lam) * factor
                else:
                    moved = self._operator_closure(j, True, config.zs, p, tau + p, f)(lam)
                    lhs = alpha_gauss(lam, eta)[:, None] * moved / d_multiplier(j, lam, "D", self.weights, eta)
                    rhs = self._operator_closure(j, True, config.zs, p, tau, alpha_f)(lam) * factor
                worst = max(worst, relative_residual(lhs, rhs))
        return worst


def gamma_shift(j: int, f: GridFunction) -> GridFunction:
    return QkzbOperators(f.weights, f.eta).gamma_shift(j, f)


def apply_K(j: int, config: QkzbConfig, f: GridFunction, rmatrix: Optional[RMatrix] = None) -> GridFunction:
    return QkzbOperators.for_config(config, rmatrix).apply_K(j, config, f)


def apply_K_vee(j: int, config: QkzbConfig, f: GridFunction, rmatrix: Optional[RMatrix] = None) -> GridFunction:
    return QkzbOperators.for_config(config, rmatrix).apply_K_vee(j, config, f)


def lemma16_residual(j: int, config: QkzbConfig, lam=(0.31 + 0.12j, -0.27 + 0.05j), which: str = "K") -> float:
    return QkzbOperators.for_config(config).lemma16_residual(j, config, lam, which)

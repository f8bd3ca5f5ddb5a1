"""Weight modules V_Lambda, their finite quotients and the zero-weight basis."""

import itertools
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from core.exceptions import DomainError
from core.models import HighestWeights

Index = Tuple[int, ...]


def weight_of(k: int, Lambda: float) -> float:
    """h-eigenvalue of e_k in V_Lambda."""
    if k < 0:
        raise DomainError("basis index must be nonnegative")
    return Lambda - 2 * k


def zero_weight_basis(weights: HighestWeights, finite: bool = True) -> List[Index]:
    """
    Lexicographically ordered indices I with sum(i_k) = m.

    Args:
        weights: highest weights
        finite: restrict to i_k <= Lambda_k (integer weights only)

    Returns:
        Ordered list of index tuples
    """
    if finite and not weights.is_integer:
        raise DomainError("finite modules need nonnegative integer weights")
    m = weights.m
    caps = [int(round(L)) if finite else m for L in weights.lambdas]
    ranges = [range(min(cap, m) + 1) for cap in caps]
    return [I for I in itertools.product(*ranges) if sum(I) == m]


def is_admissible(I: Sequence[int], weights: HighestWeights) -> bool:
    """True iff i_a <= Lambda_a for every slot."""
    if not weights.is_integer:
        raise DomainError("admissibility is defined for integer weights")
    return all(i <= round(L) for i, L in zip(I, weights.lambdas))


def reverse_weights(weights: HighestWeights) -> HighestWeights:
    return weights.reversed()


class WeightSpace:
    """Zero-weight subspace of a tensor product with its ordered basis."""

    def __init__(self, weights: HighestWeights, finite: bool = True):
        self.weights = weights
        self.finite = finite
        self.basis: List[Index] = zero_weight_basis(weights, finite)
        self.index: Dict[Index, int] = {I: k for k, I in enumerate(self.basis)}
        lambdas = np.array(weights.lambdas)
        if self.basis:
            self.h = np.array([[lambdas[j] - 2 * I[j] for I in self.basis] for j in range(weights.n)])
        else:
            self.h = np.zeros((weights.n, 0))

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def lambdas(self) -> Tuple[float, ...]:
        return self.weights.lambdas

    def weight_sum(self, slots: Sequence[int]) -> np.ndarray:
        """Sum of the slot weights h^{(l)} over the given 0-based slots, per basis vector."""
        slots = list(slots)
        if not slots:
            return np.zeros(self.dim)
        return self.h[slots].sum(axis=0)

    def reversed(self) -> "WeightSpace":
        return WeightSpace(self.weights.reversed(), self.finite)

    def flip_permutation(self) -> np.ndarray:
        """perm[k] = position of reversed(basis[k]) in the reversed space."""
        target = self.reversed()
        return np.array([target.index[tuple(reversed(I))] for I in self.basis], dtype=int)

    def flip_matrix(self) -> np.ndarray:
        """Matrix of P: V -> V^vee, v_1 x ... x v_n -> v_n x ... x v_1."""
        P = np.zeros((self.dim, self.dim))
        P[self.flip_permutation(), np.arange(self.dim)] = 1.0
        return P


def flip_P(v: Union[Dict[Index, complex], np.ndarray], weights: HighestWeights, finite: bool = True):
    """
    Reverse the tensor factors of a zero-weight vector.

    Args:
        v: coefficients as a mapping I -> c or as an array in basis order
        weights: highest weights of v's space
        finite: basis convention of the array form

    Returns:
        Same representation, now over the reversed weights
    """
    if isinstance(v, dict):
        return {tuple(reversed(I)): c for I, c in v.items()}
    space = WeightSpace(weights, finite)
    out = np.zeros_like(np.asarray(v, dtype=complex))
    out[..., space.flip_permutation()] = v
    return out

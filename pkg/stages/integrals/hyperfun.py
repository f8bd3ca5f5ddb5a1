"""Weight functions and the universal hypergeometric function u(z, lambda, mu, tau, p)."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from core.exceptions import DomainError, NonConvergentRegionError
from core.models import ContourSpec, HighestWeights, QkzbConfig
from stages.algebra.qkzb import QkzbOperators, d_multiplier
from stages.algebra.rmatrix import RMatrix
from stages.algebra.weights import Index, WeightSpace
from stages.integrals.contour import (
    SingularPoint,
    build_contour,
    contour_nodes,
    residue,
    lattice_extent,
    torus_nodes,
)
from stages.special.phase import omega_phase
from stages.special.theta import require_nonzero, theta
from utils.numerics import parallel_map, relative_residual

logger = logging.getLogger(__name__)


@dataclass
class HyperValue:
    """u at one (lambda, mu): tensor[I, J] over the zero-weight basis."""
    tensor: np.ndarray
    basis: List[Index]
    zs: Tuple[complex, ...]
    lam: complex
    mu: complex
    tau: complex
    p: complex
    provenance: Dict[str, str] = field(default_factory=dict)

    def entry(self, I: Index, J: Index) -> complex:
        return complex(self.tensor[self.basis.index(tuple(I)), self.basis.index(tuple(J))])


def _assignments(I: Sequence[int]) -> List[Tuple[int, ...]]:
    """Slot of each integration variable, for every split into subsets of sizes I."""
    slots = [k for k, count in enumerate(I) for _ in range(count)]
    return sorted(set(itertools.permutations(slots)))


def _theta_ratio(num, den, tau, factor):
    bottom = theta(den, tau)
    require_nonzero(bottom, factor)
    return theta(num, tau) / bottom


def weight_values(I: Sequence[int], T: np.ndarray, zs: Sequence[complex], lam, tau: complex,
                  lambdas: Sequence[float], eta: complex) -> np.ndarray:
    """
    omega_I(t, z, lambda, tau) on nodes T of shape (P, m) for lambdas of shape (L,).

    Returns:
        (L, P) array
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))[:, None]
    T = np.asarray(T, dtype=complex).reshape(-1, sum(I)) if sum(I) else np.zeros((np.shape(T)[0], 0), dtype=complex)
    P, m = T.shape
    if m == 0:
        return np.ones((lam.shape[0], P), dtype=complex)
    n = len(lambdas)
    total = np.zeros((lam.shape[0], P), dtype=complex)
    for assign in _assignments(I):
        term = np.ones((lam.shape[0], P), dtype=complex)
        for i in range(m):
            l, ti = assign[i], T[:, i]
            for k in range(l):
                term = term * _theta_ratio(ti - zs[k] + eta * lambdas[k], ti - zs[k] - eta * lambdas[k], tau, f"theta(t-z_{k+1}-eta*L)")
            shift = -eta * lambdas[l] + 2 * eta * I[l] - 2 * eta * sum(lambdas[k] - 2 * I[k] for k in range(l))
            den = theta(ti - zs[l] - eta * lambdas[l], tau)
            require_nonzero(den, f"theta(t-z_{l+1}-eta*L)")
            term = term * theta(lam + ti[None, :] - zs[l] + shift, tau) / den
        for i, j in itertools.combinations(range(m), 2):
            x = T[:, i] - T[:, j]
            if assign[i] > assign[j]:
                term = term * -_theta_ratio(2 * eta - x, x + 2 * eta, tau, "theta(t_i-t_j+2eta)")
            elif assign[i] == assign[j]:
                term = term * _theta_ratio(x, x + 2 * eta, tau, "theta(t_i-t_j+2eta)")
        total = total + term
    return total


def weight_fn(I: Sequence[int], t: Sequence[complex], zs: Sequence[complex], lam: complex, tau: complex,
              weights: HighestWeights, eta: complex) -> complex:
    """Weight function omega_I at a single point t = (t_1, ..., t_m)."""
    if len(I) != weights.n or any(i < 0 for i in I):
        raise DomainError(f"bad index {I} for {weights.n} slots")
    T = np.asarray(t, dtype=complex).reshape(1, -1)
    if T.shape[1] != sum(I):
        raise DomainError("the number of integration variables must equal sum(I)")
    return complex(weight_values(I, T, zs, lam, tau, weights.lambdas, eta)[0, 0])


def mirror_weight_fn(J: Sequence[int], t: Sequence[complex], zs: Sequence[complex], mu: complex, p: complex,
                     weights: HighestWeights, eta: complex) -> complex:
    """omega^vee_J(t, z, mu, p, Lambda) = omega_{J^vee}(t, z^vee, mu, p, Lambda^vee)."""
    return weight_fn(tuple(reversed(J)), t, tuple(reversed(zs)), mu, p, weights.reversed(), eta)


def phase_product(T: np.ndarray, zs: Sequence[complex], tau: complex, p: complex, lambdas: Sequence[float], eta: complex) -> np.ndarray:
    """prod_{i,k} Omega_{eta Lambda_k}(t_i - z_k) prod_{i<j} Omega_{-2 eta}(t_i - t_j), shape (P,)."""
    T = np.asarray(T, dtype=complex)
    out = np.ones(T.shape[0], dtype=complex)
    for i in range(T.shape[1]):
        for k, L in enumerate(lambdas):
            if L:
                out = out * omega_phase(eta * L, T[:, i] - zs[k], tau, p)
    for i, j in itertools.combinations(range(T.shape[1]), 2):
        out = out * omega_phase(-2 * eta, T[:, i] - T[:, j], tau, p)
    return out


class HypergeometricFunction:
    """u(z, lambda, mu, tau, p) for fixed z, moduli, weights and eta, with a reusable quadrature rule."""

    def __init__(
        self,
        zs: Sequence[complex],
        tau: complex,
        p: complex,
        weights: HighestWeights,
        eta: complex,
        orientation: Optional[str] = None,
        height: float = 0.0,
        nodes: Optional[int] = None,
        detour_nodes: Optional[int] = None,
        contour: Optional[ContourSpec] = None,
    ):
        if len(zs) != weights.n:
            raise DomainError("one marked point per highest weight is required")
        self.zs = tuple(complex(z) for z in zs)
        self.tau, self.p, self.eta = complex(tau), complex(p), complex(eta)
        self.weights = weights
        self.lambdas = weights.lambdas
        self.m = weights.m
        self.space = WeightSpace(weights, finite=weights.is_integer)
        self.orientation = orientation or settings.contour_orientation
        self.height = height
        self.nodes = nodes or settings.quad_nodes
        self.detour_nodes = detour_nodes or settings.detour_nodes
        self._contour = contour
        self._rule: Optional[Tuple[np.ndarray, np.ndarray]] = None
        self.method = ""

    # ------------------------------------------------------------------ singular points

    def marked_points(self) -> List[SingularPoint]:
        """Singular points of a single variable coming from the marked points."""
        points = []
        for k, (z, L) in enumerate(zip(self.zs, self.lambdas)):
            if not L:
                continue
            a = self.eta * L
            J = lattice_extent(a.imag + z.imag, self.tau, self.height)
            K = lattice_extent(a.imag + z.imag, self.p, self.height)
            for j in range(J):
                for q in range(K):
                    points.append(SingularPoint(z - a - j * self.tau - q * self.p, -1, f"Omega z{k+1} lower ({j},{q})"))
                    points.append(SingularPoint(z + a + (j + 1) * self.tau + (q + 1) * self.p, 1, f"Omega z{k+1} upper ({j},{q})"))
            for s in range(J):
                points.append(SingularPoint(z + a + s * self.tau, 1, f"omega z{k+1} s={s}"))
            for s in range(K):
                points.append(SingularPoint(z + a + s * self.p, 1, f"omega-vee z{k+1} s={s}"))
        return points

    def pair_offsets(self, later: bool) -> List[Tuple[complex, int]]:
        """
        Offsets c and sides of the points t_l = t_i + c.

        later: t_l comes after t_i in the ordering of the variables.
        """
        b = 2 * self.eta
        J = lattice_extent(b.imag, self.tau, self.height)
        K = lattice_extent(b.imag, self.p, self.height)
        out = []
        sign = 1 if later else -1
        for j in range(J):
            for q in range(K):
                out.append((sign * (-b + j * self.tau + q * self.p), sign))
                out.append((sign * (b - (j + 1) * self.tau - (q + 1) * self.p), -sign))
        for s in range(J):
            out.append((sign * (b - s * self.tau), -sign))
        for s in range(K):
            out.append((sign * (b - s * self.p), -sign))
        return out

    def max_radius(self) -> float:
        """Arc and loop radii stay below 2|eta Lambda_k|, the gap between a pole and its cancelled theta zero."""
        gaps = [abs(2 * self.eta)] + [abs(2 * self.eta * L) for L in self.lambdas if L]
        return min(0.1, 0.4 * min(gaps))

    def _in_torus_region(self) -> bool:
        points = self.marked_points()
        offsets = self.pair_offsets(True)
        ok_points = all(np.sign(pt.location.imag) == pt.side and abs(pt.location.imag) > 1e-3 for pt in points)
        ok_pairs = all(np.sign(c.imag) == side and abs(c.imag) > 1e-3 for c, side in offsets)
        return ok_points and ok_pairs

    # ------------------------------------------------------------------ quadrature rule

    def contour(self) -> ContourSpec:
        """Cycle of a single variable (m = 1), or of the outer variable (m = 2)."""
        if self._contour is not None:
            return self._contour
        points = self.marked_points()
        if self.m == 2:
            for pt in self.marked_points():
                for c, side in self.pair_offsets(True):
                    if side != pt.side:
                        points.append(SingularPoint(pt.location - c, pt.side, f"pinch {pt.label}"))
        return build_contour(points, self.orientation, self.height, self.nodes, self.detour_nodes, tag="gamma",
                             max_radius=self.max_radius())

    def _inner_rule(self, t1: complex) -> Tuple[np.ndarray, np.ndarray]:
        points = self.marked_points() + [
            SingularPoint(t1 + c, side, "pair") for c, side in self.pair_offsets(True)
        ]
        spec = build_contour(points, self.orientation, self.height, self.nodes, self.detour_nodes,
                             tag="gamma-inner", max_radius=self.max_radius())
        return contour_nodes(spec)

    def quadrature(self) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes T of shape (P, m) and weights w (P,)."""
        if self._rule is not None:
            return self._rule
        if self.m == 0:
            self._rule, self.method = (np.zeros((1, 0), dtype=complex), np.ones(1, dtype=complex)), "none"
        elif self.m == 1:
            t, w = contour_nodes(self.contour())
            self._rule, self.method = (t[:, None], w), "cycle"
        elif self._in_torus_region():
            T, weight = torus_nodes(self.m)
            self._rule, self.method = (T, np.full(T.shape[0], weight, dtype=complex)), "torus"
        elif self.m == 2:
            t1, w1 = contour_nodes(self.contour())
            inner = parallel_map(self._inner_rule, list(t1))
            T = np.concatenate([np.column_stack([np.full(t2.size, a), t2]) for a, (t2, _) in zip(t1, inner)])
            w = np.concatenate([wa * w2 for wa, (_, w2) in zip(w1, inner)])
            self._rule, self.method = (T, w), "nested"
        else:
            raise NonConvergentRegionError(
                f"m={self.m} integrals are evaluated on the torus only inside the convergent region"
            )
        return self._rule

    def phase_weights(self) -> np.ndarray:
        T, w = self.quadrature()
        if not hasattr(self, "_phase_w"):
            self._phase_w = w * phase_product(T, self.zs, self.tau, self.p, self.lambdas, self.eta)
        return self._phase_w

    # ------------------------------------------------------------------ evaluation

    def omega_table(self, x, mirror: bool = False) -> np.ndarray:
        """(L, P, dim) table of omega_I (or omega^vee_J) on the quadrature nodes."""
        T, _ = self.quadrature()
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        out = np.empty((x.size, T.shape[0], self.space.dim), dtype=complex)
        for k, I in enumerate(self.space.basis):
            if mirror:
                out[:, :, k] = weight_values(tuple(reversed(I)), T, tuple(reversed(self.zs)), x, self.p,
                                             tuple(reversed(self.lambdas)), self.eta)
            else:
                out[:, :, k] = weight_values(I, T, self.zs, x, self.tau, self.lambdas, self.eta)
        return out

    def table(self, lam, mu) -> np.ndarray:
        """u[a, b, I, J] at lam[a], mu[b]."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        mu = np.atleast_1d(np.asarray(mu, dtype=complex))
        A = self.omega_table(lam)
        B = self.omega_table(mu, mirror=True)
        core = np.einsum("anI,n,bnJ->abIJ", A, self.phase_weights(), B)
        prefactor = np.exp(-np.pi * 1j * np.outer(lam, mu) / (2 * self.eta))
        return prefactor[:, :, None, None] * core

    def value(self, lam: complex, mu: complex) -> HyperValue:
        tensor = self.table(lam, mu)[0, 0]
        return HyperValue(
            tensor=tensor, basis=list(self.space.basis), zs=self.zs, lam=lam, mu=mu, tau=self.tau, p=self.p,
            provenance={"orientation": self.orientation, "method": self.method},
        )

    def shifted(self, j: int, step: complex) -> "HypergeometricFunction":
        zs = list(self.zs)
        zs[j] += step
        return HypergeometricFunction(zs, self.tau, self.p, self.weights, self.eta, self.orientation,
                                      self.height, self.nodes, self.detour_nodes)

    def refined(self, factor: int = 2) -> "HypergeometricFunction":
        return HypergeometricFunction(self.zs, self.tau, self.p, self.weights, self.eta, self.orientation,
                                      self.height, self.nodes * factor, self.detour_nodes * factor)


def universal_u(zs, lam, mu, tau, p, weights: HighestWeights, eta, contour: Optional[ContourSpec] = None) -> HyperValue:
    return HypergeometricFunction(zs, tau, p, weights, eta, contour=contour).value(lam, mu)


# ---------------------------------------------------------------------- identities


def qkzb_system_residual(
    which: str,
    j: int,
    zs: Sequence[complex],
    lam: Sequence[complex],
    mu: Sequence[complex],
    tau: complex,
    p: complex,
    weights: HighestWeights,
    eta: complex,
    rmatrix: Optional[RMatrix] = None,
    hf: Optional[HypergeometricFunction] = None,
) -> float:
    """
    Relative residual of one line of the difference system satisfied by u.

    which: "p-shift"   u(z + p d_j) = K_j(z, tau, p) x D_j u(z)
           "tau-shift" u(z + tau d_j) = D_j^vee x K_j^vee(z, p, tau) u(z)
           "period"    u(z + d_j) = u(z)

    hf may be any table source with zs, space, table(lam, mu) and shifted(j, step);
    the composed kernel of the heat operators is checked the same way.
    """
    hf = hf or HypergeometricFunction(zs, tau, p, weights, eta)
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    if which == "period":
        return relative_residual(hf.shifted(j, 1.0).table(lam, mu), hf.table(lam, mu))
    config = QkzbConfig(zs=tuple(hf.zs), tau=tau, p=p, eta=eta, weights=weights)
    ops = QkzbOperators(weights, eta, rmatrix)
    dim = hf.space.dim
    if which == "p-shift":
        lhs = hf.shifted(j, p).table(lam, mu)
        rhs = np.empty_like(lhs)
        d = d_multiplier(j, mu, "D", weights, eta)
        for b in range(mu.size):
            for J in range(dim):
                column = lambda x, b=b, J=J: hf.table(x, mu[b])[:, 0, :, J]
                image = ops._operator_closure(j, False, config.zs, tau, p, column)(lam)
                rhs[:, b, :, J] = image * d[b, J]
    elif which == "tau-shift":
        lhs = hf.shifted(j, tau).table(lam, mu)
        rhs = np.empty_like(lhs)
        d = d_multiplier(j, lam, "D_vee", weights, eta)
        for a in range(lam.size):
            for I in range(dim):
                row = lambda x, a=a, I=I: hf.table(lam[a], x)[0, :, I, :]
                image = ops._operator_closure(j, True, config.zs, p, tau, row)(mu)
                rhs[a, :, I, :] = image * d[a, I]
    else:
        raise DomainError(f"unknown system line {which}")
    return relative_residual(lhs, rhs)


def true_solution(I: Sequence[int], mu: complex, zs, lam, tau, p, weights: HighestWeights, eta,
                  hf: Optional[HypergeometricFunction] = None) -> np.ndarray:
    """
    prod_i d_{i,I}(mu)^{-z_i/p} u^I(z, lambda, mu): the e_I-coefficient of u in the second factor,
    as a vector over the first factor (principal branch of the powers).
    """
    hf = hf or HypergeometricFunction(zs, tau, p, weights, eta)
    col = hf.space.index[tuple(I)]
    factor = 1.0 + 0j
    for i, z in enumerate(hf.zs):
        d = d_multiplier(i, mu, "D", weights, eta)[0, col]
        if abs(d) < settings.pole_threshold:
            raise DomainError(f"multiplier d_{i+1},I vanishes")
        factor *= np.exp(-(z / p) * np.log(d))
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    return factor * hf.table(lam, mu)[:, 0, :, col]


def multiplier_residuals(I: Sequence[int], mu: complex, zs, lam: complex, tau, p, weights: HighestWeights, eta) -> Dict[str, float]:
    """Residuals of v(z + d_i) = d_{i,I}^{-1/p} v(z) and v(lambda + 1) = e^{-pi i (mu + 2 eta m)/2 eta} v(lambda)."""
    hf = HypergeometricFunction(zs, tau, p, weights, eta)
    base = true_solution(I, mu, zs, lam, tau, p, weights, eta, hf)
    col = hf.space.index[tuple(I)]
    out = {}
    for i in range(len(zs)):
        moved_zs = list(zs)
        moved_zs[i] += 1.0
        moved = true_solution(I, mu, moved_zs, lam, tau, p, weights, eta, hf.shifted(i, 1.0))
        d = d_multiplier(i, mu, "D", weights, eta)[0, col]
        out[f"z{i+1}"] = relative_residual(moved, np.exp(-np.log(d) / p) * base)
    lam_moved = true_solution(I, mu, zs, lam + 1.0, tau, p, weights, eta, hf)
    expected = np.exp(-np.pi * 1j * (mu + 2 * eta * weights.m) / (2 * eta)) * base
    out["lambda"] = relative_residual(lam_moved, expected)
    return out


def quadrature_stability(hf: HypergeometricFunction, lam, mu) -> float:
    """Change of the u table when the nodes per piece are doubled."""
    return relative_residual(hf.refined(2).table(lam, mu), hf.table(lam, mu))


def contour_shift_residual(hf: HypergeometricFunction, lam, mu, height: float = 0.05) -> float:
    """Change of u when the base line of the cycle is moved to another height."""
    moved = HypergeometricFunction(hf.zs, hf.tau, hf.p, hf.weights, hf.eta, hf.orientation, height, hf.nodes, hf.detour_nodes)
    return relative_residual(moved.table(lam, mu), hf.table(lam, mu))


# ---------------------------------------------------------------------- n = 1, Lambda = 2 kernel identities

def _is_translate(a: complex, b: complex) -> bool:
    d = a - b
    return abs(d.imag) < 1e-9 and abs((d.real + 0.5) % 1.0 - 0.5) < 1e-9


def split_cycle(tau: complex, p: complex, eta: complex, orientation: Optional[str] = None,
                lift: Optional[float] = None) -> Tuple[ContourSpec, complex, float]:
    """
    The n=1, Lambda=2 cycle moved to height `lift`, without its loops around translates of 2 eta.

    Returns:
        (moved cycle, total winding of the removed loops, lift used)
    """
    orientation = orientation or settings.contour_orientation
    if lift is None:
        lift = 0.3 if orientation == "continued" else -0.3
    moved = HypergeometricFunction((0j,), tau, p, HighestWeights(lambdas=(2.0,)), eta,
                                   orientation=orientation, height=lift)
    spec = moved.contour()
    centre = 2 * complex(eta)
    loops = [piece for piece in spec.pieces if piece.kind == "loop" and _is_translate(piece.center, centre)]
    rest = ContourSpec(pieces=[piece for piece in spec.pieces if piece not in loops], tag="gamma-bar",
                       orientation=spec.orientation)
    return rest, sum((complex(piece.weight) for piece in loops), 0j), lift


def split_quadrature(tau: complex, p: complex, eta: complex, orientation: Optional[str] = None,
                     lift: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the moved cycle plus the residue circle at 2 eta, as one rule."""
    rest, weight, _ = split_cycle(tau, p, eta, orientation, lift)
    t_bar, w_bar = contour_nodes(rest)
    nodes = settings.residue_nodes
    angle = 2 * np.pi * np.arange(nodes) / nodes
    # the nearest other singularity is -2 eta, 4|eta| away
    circle = min(settings.residue_radius, abs(complex(eta))) * np.exp(1j * angle)
    t_res = 2 * complex(eta) + circle
    w_res = weight * 2j * np.pi * circle / nodes
    return np.concatenate([t_bar, t_res]), np.concatenate([w_bar, w_res])


def residue_split(lam: complex, mu: complex, tau: complex, p: complex, eta: complex,
                  orientation: Optional[str] = None, lift: Optional[float] = None) -> Dict[str, complex]:
    """
    u for n=1, Lambda=2 evaluated on a cycle moved off the real line, with the loop around
    t = 2 eta replaced by 2 pi i times the residue there.

    The cycle is raised (lift > 0) for "continued" and lowered for "mirrored" unless lift is given.

    Returns:
        {"direct": default evaluation, "split": moved cycle plus residue term, "residue": the residue}
    """
    weights = HighestWeights(lambdas=(2.0,))
    hf = HypergeometricFunction((0j,), tau, p, weights, eta, orientation=orientation)
    rest, weight, lift = split_cycle(tau, p, eta, hf.orientation, lift)
    centre = 2 * complex(eta)
    prefactor = np.exp(-np.pi * 1j * lam * mu / (2 * eta))

    def integrand(t):
        t = np.asarray(t, dtype=complex)
        T = t.reshape(-1, 1)
        values = (weight_values((1,), T, (0j,), lam, tau, (2.0,), eta)[0]
                  * weight_values((1,), T, (0j,), mu, p, (2.0,), eta)[0]
                  * phase_product(T, (0j,), tau, p, (2.0,), eta))
        return prefactor * values.reshape(t.shape)

    t, w = contour_nodes(rest)
    bar = complex(np.sum(w * integrand(t)))
    res = complex(residue(integrand, centre))
    direct = complex(hf.table(lam, mu)[0, 0, 0, 0])
    if weight == 0:
        logger.info(f"no loop at 2*eta on the cycle at height {lift}")
    return {"direct": direct, "split": bar + 2 * np.pi * 1j * weight * res, "residue": res}


def sigma_translation_residual(mu: complex, tau: complex, sigma: complex, eta: complex,
                               orientation: Optional[str] = None) -> float:
    """
    Compare the integrals over the fixed kernel cycle of Omega_{2eta}(t + sigma) g(t)
    and Omega_{2eta}(t) g(t - sigma), g(t) = theta(mu + t, sigma)/theta(t - 2 eta, sigma).

    The two agree when translating the cycle by sigma crosses no singular point.
    """
    hf = HypergeometricFunction((0j,), tau, sigma, HighestWeights(lambdas=(2.0,)), eta, orientation=orientation)
    t, w = contour_nodes(hf.contour())
    a = 2 * complex(eta)

    def g(x):
        den = theta(x - a, sigma)
        require_nonzero(den, "theta(t-2eta,sigma)")
        return theta(mu + x, sigma) / den

    lhs = np.sum(w * omega_phase(a, t + sigma, tau, sigma) * g(t))
    rhs = np.sum(w * omega_phase(a, t, tau, sigma) * g(t - sigma))
    return relative_residual(lhs, rhs)


def lambda_mu_symmetry_residual(lam: complex, mu: complex, tau: complex, p: complex, eta: complex) -> float:
    """e^{pi i lambda mu/2eta} u(lambda, mu, tau, p) against the same with (lambda, tau) and (mu, p) exchanged, n=1, Lambda=2."""
    weights = HighestWeights(lambdas=(2.0,))
    one = HypergeometricFunction((0j,), tau, p, weights, eta).table(lam, mu)[0, 0]
    two = HypergeometricFunction((0j,), p, tau, weights, eta).table(mu, lam)[0, 0]
    return relative_residual(one, two)

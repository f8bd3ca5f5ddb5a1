"""Integration cycles for the 1-periodic t-integrals and the truncated mu-path."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from config import settings
from core.exceptions import ContourError, DivergenceError, RefinementNeeded
from core.models import ContourPiece, ContourSpec, IntegrationPath

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SingularPoint:
    """A (possible) pole of the integrand and the side of the cycle it must lie on."""
    location: complex
    side: int  # +1: above the cycle, -1: below
    label: str = ""


@lru_cache(maxsize=64)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


def gauss_legendre(a: complex, b: complex, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on the straight segment [a, b]."""
    x, w = _legendre(n)
    half = (b - a) / 2
    return (a + b) / 2 + half * x, half * w


def lattice_extent(offset_imag: float, modulus: complex, height: float = 0.0, cap: int = 8) -> int:
    """Number of lattice steps after which multiples of the modulus push a point across the base line."""
    return min(cap, max(1, math.ceil((abs(offset_imag) + abs(height) + 1.0) / modulus.imag) + 1))


def _wrap(x: float, x0: float) -> float:
    return x0 + ((x - x0) % 1.0)


def _circular_gap(x: float, x0: float) -> float:
    frac = (x - x0) % 1.0
    return min(frac, 1.0 - frac)


def _choose_start(reals: Sequence[float], widths: Sequence[float], candidates: int = 200) -> Tuple[float, float]:
    """
    Left end x0 of the base segment and its clearance.

    x0 maximizes min_k (distance mod 1 from reals[k]) - widths[k], so no detour straddles it.
    """
    if not len(reals):
        return -0.5, 0.5
    best, best_gap = -0.5, -math.inf
    for x0 in -0.5 + np.arange(candidates) / candidates:
        gap = min(_circular_gap(x, x0) - w for x, w in zip(reals, widths))
        if gap > best_gap + 1e-12:
            best, best_gap = float(x0), gap
    return best, best_gap


def _arc_angles(side: int, offset: float, radius: float) -> Tuple[float, float]:
    """
    Angles of the arc around a pole joining the two crossings of the base line.

    offset is the height of the base line above the pole (|offset| < radius). The arc
    starts at the left crossing; side -1 passes above the pole, side +1 below.
    """
    psi = math.asin(offset / radius)
    if side < 0:
        return math.pi - psi, psi
    return math.pi - psi, 2 * math.pi + psi


def build_contour(
    points: Sequence[SingularPoint],
    orientation: Optional[str] = None,
    height: float = 0.0,
    nodes: Optional[int] = None,
    detour_nodes: Optional[int] = None,
    residue_nodes: Optional[int] = None,
    tag: str = "gamma",
    max_radius: float = 0.1,
) -> ContourSpec:
    """
    Cycle homologous to [x0, x0+1] + i*height that leaves every point on its required side.

    Points closer to the base line than their detour radius get an arc of a circle
    centred on the point itself; points on the wrong side further away are accounted
    for by small counterclockwise loops of weight +-1.

    Args:
        points: singular points with required sides
        orientation: "continued" (sides as given) or "mirrored" (all sides flipped)
        height: imaginary part of the base segment
        nodes: Gauss-Legendre nodes per panel
        detour_nodes: nodes per arc
        residue_nodes: trapezoid nodes per loop
        tag: description tag
        max_radius: upper bound on arc and loop radii; callers pass less than the distance
            from a pole to the nearest point where the integrand is a removable 0/0

    Returns:
        ContourSpec
    """
    orientation = orientation or settings.contour_orientation
    if orientation not in ("continued", "mirrored"):
        raise ContourError(f"unknown orientation {orientation}")
    flip = -1 if orientation == "mirrored" else 1
    nodes = nodes or settings.quad_nodes
    detour_nodes = detour_nodes or settings.detour_nodes
    residue_nodes = residue_nodes or settings.residue_nodes

    unique: List[SingularPoint] = []
    for point in points:
        if all(abs(point.location - other.location) > 1e-12 for other in unique):
            unique.append(point)
    reps = [SingularPoint(complex(_wrap(p.location.real, -0.5), p.location.imag), flip * p.side, p.label) for p in unique]

    def separation(k: int) -> float:
        here = reps[k].location
        gaps = [abs(here - other.location + shift) for i, other in enumerate(reps) for shift in (-1, 0, 1) if i != k or shift]
        return min(gaps) if gaps else 1.0

    # kind per point: ("detour", radius) | ("loop", radius) | ("plain", 0)
    layout = []
    for k, point in enumerate(reps):
        dist = point.location.imag - height
        sep = separation(k)
        if sep < 1e-6:
            logger.warning(f"contour pinch: {point.label} within {sep:.1e} of another singular point")
        radius = min(max_radius, sep / 3)
        if abs(dist) < radius:
            layout.append(("detour", radius))
        elif np.sign(dist) != point.side:
            layout.append(("loop", min(max_radius, 0.4 * sep)))
        else:
            layout.append(("plain", 0.0))

    widths = [
        math.sqrt(max(r * r - (p.location.imag - height) ** 2, 0.0)) if kind == "detour" else 0.0
        for p, (kind, r) in zip(reps, layout)
    ]
    x0, clearance = _choose_start([p.location.real for p in reps], widths)
    if clearance <= 1e-9:
        raise ContourError("no base point clears every detour")
    reps = [SingularPoint(complex(_wrap(p.location.real, x0), p.location.imag), p.side, p.label) for p in reps]

    cuts = {x0, x0 + 1.0}
    blocked, arcs, loops, graded = [], {}, [], []
    for point, (kind, radius), width in zip(reps, layout, widths):
        c = point.location.real
        dist = point.location.imag - height
        if kind == "detour":
            left, right = c - width, c + width
            cuts.update((left, right))
            blocked.append((left, right))
            arcs[round(left, 12)] = ContourPiece(
                kind="arc", center=point.location, radius=radius,
                angles=_arc_angles(point.side, -dist, radius), nodes=detour_nodes,
            )
            graded.append((c, radius))
            continue
        if kind == "loop":
            loops.append(ContourPiece(
                kind="loop", center=point.location, radius=radius,
                weight=complex(point.side), nodes=residue_nodes,
            ))
        graded.append((c, abs(dist)))
    for c, d in graded:
        step = max(d, 1e-3)
        while step < 0.5:
            for x in (c - step, c + step):
                if x0 < x < x0 + 1.0 and not any(lo - 1e-12 <= x <= hi + 1e-12 for lo, hi in blocked):
                    cuts.add(x)
            step *= 2
    cuts = sorted(cuts)

    pieces: List[ContourPiece] = []
    for a, b in zip(cuts, cuts[1:]):
        if b - a < 1e-14:
            continue
        arc = arcs.get(round(a, 12))
        if arc is not None:
            pieces.append(arc)
        else:
            pieces.append(ContourPiece(kind="segment", start=complex(a, height), end=complex(b, height), nodes=nodes))
    pieces.extend(loops)
    return ContourSpec(pieces=pieces, tag=tag, orientation=orientation)


def contour_nodes(spec: ContourSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes t and weights w with sum w f(t) approximating the cycle integral."""
    ts, ws = [], []
    for piece in spec.pieces:
        if piece.kind == "segment":
            t, w = gauss_legendre(piece.start, piece.end, piece.nodes)
        elif piece.kind == "arc":
            theta, wt = gauss_legendre(piece.angles[0], piece.angles[1], piece.nodes)
            theta = theta.real
            t = piece.center + piece.radius * np.exp(1j * theta)
            w = 1j * piece.radius * np.exp(1j * theta) * wt.real
        elif piece.kind == "loop":
            theta = 2 * np.pi * np.arange(piece.nodes) / piece.nodes
            t = piece.center + piece.radius * np.exp(1j * theta)
            w = piece.weight * (2 * np.pi / piece.nodes) * 1j * piece.radius * np.exp(1j * theta)
        else:
            raise ContourError(f"unknown contour piece {piece.kind}")
        ts.append(np.asarray(t, dtype=complex))
        ws.append(np.asarray(w, dtype=complex))
    if not ts:
        raise ContourError("empty contour")
    return np.concatenate(ts), np.concatenate(ws)


def integrate_contour(f: Integrand, spec: ContourSpec) -> np.ndarray:
    """Cycle integral of a vectorized integrand (values may carry trailing axes)."""
    t, w = contour_nodes(spec)
    return np.tensordot(w, np.asarray(f(t)), axes=(0, 0))


def residue(f: Integrand, center: complex, radius: Optional[float] = None, nodes: Optional[int] = None) -> np.ndarray:
    """(1/2 pi i) times the integral over a small counterclockwise circle."""
    radius = radius or settings.residue_radius
    nodes = nodes or settings.residue_nodes
    theta = 2 * np.pi * np.arange(nodes) / nodes
    t = center + radius * np.exp(1j * theta)
    w = radius * np.exp(1j * theta) / nodes
    return np.tensordot(w, np.asarray(f(t)), axes=(0, 0))


def torus_nodes(m: int, points: Optional[int] = None, start: float = 0.0) -> Tuple[np.ndarray, float]:
    """Product trapezoid rule on the real torus [0,1]^m: (nodes of shape (P^m, m), uniform weight)."""
    points = points or settings.torus_points
    axis = start + np.arange(points) / points
    grid = np.stack(np.meshgrid(*([axis] * m), indexing="ij"), axis=-1).reshape(-1, m)
    return grid.astype(complex), 1.0 / points ** m


# ---------------------------------------------------------------------- mu-path

def default_path(eta: complex, offset: complex = 0j, scale: complex = 2.0) -> IntegrationPath:
    """
    Path mu = scale*eta*t + offset, truncated where the Gaussian alpha has decayed.

    |alpha(scale*eta*t)| = exp(pi Im(eta) scale^2 t^2 / 4), so T solves
    pi |Im eta| (scale/2)^2 T^2 = path_exponent.
    """
    rate = math.pi * abs(complex(eta).imag) * abs(scale / 2) ** 2
    if rate <= 0:
        raise DivergenceError("the Gaussian weight does not decay along a real eta direction")
    t_max = math.sqrt(settings.path_exponent / rate)
    return IntegrationPath(direction=scale * eta, offset=offset, t_max=t_max, nodes=settings.path_nodes)


def through_saddle(path: IntegrationPath, center: complex) -> IntegrationPath:
    """
    The same path moved by center.

    A Gaussian weight times e^{-pi i x mu/2eta} peaks at mu = -x, far from the unshifted path when
    Im x is large; moving the path there keeps the integrand of the size of the result.
    Only valid for integrands without poles between the two paths.
    """
    return path.model_copy(update={"offset": complex(path.offset) + complex(center)})


def integrate_pointwise(f: Callable[[complex, np.ndarray], np.ndarray], xs, path: IntegrationPath,
                        center: Callable[[complex], complex]) -> np.ndarray:
    """Stack of integrate_path(lambda mu: f(x, mu), path moved by center(x)) over xs."""
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    return np.stack([integrate_path(lambda mu, x=x: f(x, mu), through_saddle(path, center(x))) for x in xs])


def path_nodes(path: IntegrationPath) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes mu and weights d mu along the path."""
    edges = np.linspace(-path.t_max, path.t_max, path.panels + 1)
    ts, ws = [], []
    for a, b in zip(edges, edges[1:]):
        t, w = gauss_legendre(a, b, path.nodes)
        ts.append(t.real)
        ws.append(w.real)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    return path.direction * t + path.offset, path.direction * w


def integrate_path(f: Integrand, path: IntegrationPath, decay: float = 1e-14) -> np.ndarray:
    """
    Path integral with refinement until the integrand is negligible at both ends.

    Raises:
        DivergenceError: the endpoint check still fails after max_refinements attempts
    """
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(settings.max_refinements),
            retry=retry_if_exception_type(RefinementNeeded),
            reraise=True,
        ):
            with attempt:
                level = attempt.retry_state.attempt_number - 1
                current = path.model_copy(update={
                    "t_max": path.t_max * 1.5 ** level,
                    "nodes": path.nodes * 2 ** level,
                })
                mu, w = path_nodes(current)
                values = np.asarray(f(mu))
                flat = np.abs(values.reshape(values.shape[0], -1))
                ends = max(flat[0].max(), flat[-1].max())
                if ends > decay * max(1.0, flat.max()):
                    if level:
                        logger.warning(f"path integrand not decayed at t_max={current.t_max:.2f} (ratio {ends:.1e})")
                    raise RefinementNeeded(f"endpoint magnitude {ends:.2e}")
                return np.tensordot(w, values, axes=(0, 0))
    except RefinementNeeded as e:
        raise DivergenceError(f"path integrand does not decay: {e}") from e

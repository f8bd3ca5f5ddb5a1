"""Tests for the integration cycles, the hypergeometric integrals, the pairing and the heat operators."""

import pytest
import numpy as np
from numpy.testing import assert_allclose
from pathlib import Path
import sys

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from core.exceptions import ContourError
from core.models import HighestWeights
from stages.algebra.weights import WeightSpace
from stages.integrals.contour import (
    SingularPoint,
    build_contour,
    contour_nodes,
    default_path,
    integrate_contour,
    integrate_pointwise,
    through_saddle,
)
from stages.integrals.heat import conjecture_constant, conjecture_ratio, theorem1_residual, theorem1_vee_residual
from stages.integrals.hyperfun import HypergeometricFunction, contour_shift_residual, qkzb_system_residual
from stages.integrals.rational import RationalHeatOperator, periodicity_residual
from stages.integrals.shapovalov import translation_residual

TAU = 0.13 + 0.9j
P = 0.07 + 0.7j
ETA = -0.05j
ZS = (0.11 + 0.02j, -0.23 + 0.05j)
LAM = np.array([0.17 + 0.05j, -0.08 + 0.11j])
MU = np.array([0.21 - 0.03j, 0.05 + 0.09j])
PAIR = HighestWeights(lambdas=(1.0, 1.0))
SINGLE = HighestWeights(lambdas=(2.0,))


def periodic_pole(a):
    """1/(1 - e(t - a)): one pole per period, cycle integral 1 with a below the cycle and 0 with a above."""
    return lambda t: 1.0 / (1.0 - np.exp(2j * np.pi * (np.asarray(t) - a)))


def same_mod_one(x, y):
    d = x - y
    return abs(d.imag) < 1e-12 and abs((d.real + 0.5) % 1.0 - 0.5) < 1e-12


class TestContour:
    """Test the cycles of the 1-periodic t-integrals."""

    POLE = 0.3 + 0.004j

    def test_unknown_orientation(self):
        """Test unknown orientations are refused."""
        with pytest.raises(ContourError):
            build_contour([SingularPoint(self.POLE, 1)], orientation="sideways")

    def test_arc_is_centred_on_the_pole(self):
        """Test a pole next to the base line is passed on an arc around the pole itself."""
        spec = build_contour([SingularPoint(self.POLE, -1, "pole")], "continued", max_radius=0.05)
        arcs = [piece for piece in spec.pieces if piece.kind == "arc"]
        assert len(arcs) == 1
        assert same_mod_one(complex(arcs[0].center), self.POLE)
        assert arcs[0].radius == pytest.approx(0.05)
        t, _ = contour_nodes(spec)
        distance = np.min(np.abs(t[:, None] - (self.POLE + np.array([-1.0, 0.0, 1.0]))[None, :]))
        assert distance > 0.05 - 1e-12

    @pytest.mark.parametrize("height", [0.0, 0.05, -0.02])
    def test_height_does_not_change_the_cycle(self, height):
        """Test the cycle integral keeps its value when the base line moves past the pole."""
        below = build_contour([SingularPoint(self.POLE, -1)], "continued", height=height, max_radius=0.05)
        above = build_contour([SingularPoint(self.POLE, 1)], "continued", height=height, max_radius=0.05)
        assert abs(integrate_contour(periodic_pole(self.POLE), below) - 1.0) < 1e-10
        assert abs(integrate_contour(periodic_pole(self.POLE), above)) < 1e-10

    def test_mirrored_flips_sides(self):
        """Test the mirrored orientation places every point on the other side."""
        spec = build_contour([SingularPoint(self.POLE, 1)], "mirrored", max_radius=0.05)
        assert abs(integrate_contour(periodic_pole(self.POLE), spec) - 1.0) < 1e-10

    def test_base_point_clears_detours(self):
        """Test the base segment starts away from every arc."""
        points = [SingularPoint(0.3 + 0.004j, -1), SingularPoint(-0.4 - 0.003j, 1), SingularPoint(0.05 + 0.01j, -1)]
        spec = build_contour(points, "continued", max_radius=0.05)
        first = spec.pieces[0]
        assert first.kind == "segment"
        start = complex(first.start)
        assert all(abs(start - pt.location + k) > 0.05 for pt in points for k in (-1, 0, 1))


class TestGaussianPath:
    """Test the truncated mu-path and its saddle translate."""

    def test_translate_keeps_direction(self):
        """Test moving the path changes only its offset."""
        path = default_path(ETA, 0.1j)
        moved = through_saddle(path, -0.3 - 1.8j)
        assert moved.direction == path.direction
        assert moved.t_max == path.t_max
        assert complex(moved.offset) == pytest.approx(-0.3 - 1.7j)

    def test_pointwise_gaussian(self):
        """Test the Gaussian integral along 2 eta R is 2 eta/sqrt(i eta) wherever its peak sits."""
        path = default_path(ETA, 0j, scale=2.0)
        xs = np.array([0.1, 0.2 + 1.8j, -0.4 - 1.8j])
        values = integrate_pointwise(lambda x, mu: np.exp(-np.pi * 1j * (x + mu) ** 2 / (4 * ETA)), xs, path,
                                     lambda x: -x)
        assert_allclose(values, np.full(xs.size, 2 * ETA / np.sqrt(1j * ETA)), rtol=1e-10)


class TestHypergeometric:
    """Test the difference system of u."""

    def test_single_weight_system(self):
        """Test the p-shift and period lines for n=1, Lambda=2."""
        hf = HypergeometricFunction((0j,), TAU, P, SINGLE, ETA)
        for which in ("p-shift", "period"):
            assert qkzb_system_residual(which, 0, (0j,), LAM, MU, TAU, P, SINGLE, ETA, hf=hf) < 1e-6

    @pytest.mark.parametrize("j", [0, 1])
    def test_pair_p_shift(self, j):
        """Test u(z + p d_j) = K_j D_j u(z) for n=2, Lambda=(1,1)."""
        hf = HypergeometricFunction(ZS, TAU, P, PAIR, ETA)
        assert qkzb_system_residual("p-shift", j, ZS, LAM, MU, TAU, P, PAIR, ETA, hf=hf) < 1e-6

    def test_contour_height(self):
        """Test u does not depend on the height of the base line."""
        hf = HypergeometricFunction((0j,), TAU, P, SINGLE, ETA)
        assert contour_shift_residual(hf, LAM, MU, height=0.05) < 1e-8


class TestPairing:
    """Test the Shapovalov pairing."""

    def test_translation_invariance(self):
        """Test the pairing does not move with the path offset."""
        dim = WeightSpace(PAIR).dim
        f = lambda x: np.exp(0.3 * np.asarray(x))[:, None] * np.ones((1, dim))
        assert translation_residual(f, f, TAU + P, PAIR, ETA) < 1e-6


class TestHeatOperators:
    """Test the heat operators against the qKZB operators and the composition constant."""

    def test_T_commutes_with_K(self):
        """Test T(z + p d_1) K_1(tau+p) = K_1(tau) T(z)."""
        assert theorem1_residual(0, ZS, TAU, P, PAIR, ETA, LAM) < 1e-5

    def test_T_vee_commutes_with_K_vee(self):
        """Test the mirrored operator intertwines the mirrored qKZB operators."""
        assert theorem1_vee_residual(0, ZS, TAU, P, PAIR, ETA, LAM) < 1e-5

    def test_composition_constant(self):
        """Test U/u is constant and equals 1/C at total weight 2."""
        samples = [(0.17 + 0.05j, 0.21 - 0.03j), (-0.08 + 0.11j, 0.05 + 0.09j), (0.26 - 0.02j, -0.14 + 0.07j)]
        stats = conjecture_ratio((0j,), samples, TAU, P, SINGLE, ETA)
        assert stats["expected"] == pytest.approx(1.0 / conjecture_constant(ETA))
        assert stats["spread"] < 1e-4
        assert stats["deviation"] < 1e-3

    def test_rational_operator_is_periodic(self):
        """Test T_N v on the doubled grid repeats with period 2."""
        op = RationalHeatOperator(ZS, TAU, P, PAIR, 5)
        rng = np.random.default_rng(0)
        v = rng.standard_normal(10 * op.dim) + 1j * rng.standard_normal(10 * op.dim)
        assert periodicity_residual(op, v) < 1e-8

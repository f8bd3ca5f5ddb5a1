"""Tests for weight spaces, R-matrices and the Shapovalov weights."""

import pytest
import numpy as np
from numpy.testing import assert_allclose
from pathlib import Path
import sys

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from core.exceptions import DomainError
from core.models import HighestWeights
from stages.algebra.rmatrix import RMatrix, calibrate_convention, calibrated, dybe_residual, r_fused
from stages.algebra.weights import WeightSpace, flip_P, is_admissible, weight_of, zero_weight_basis
from stages.integrals.shapovalov import admissibility_mismatches, q_single, q_tensor

TAU = 0.13 + 0.9j
ETA = -0.05j


class TestWeights:
    """Test the zero-weight basis."""

    def test_basis_order(self):
        """Test lexicographic order of the indices."""
        assert zero_weight_basis(HighestWeights(lambdas=(1, 1))) == [(0, 1), (1, 0)]
        assert zero_weight_basis(HighestWeights(lambdas=(2, 1, 1))) == [(0, 1, 1), (1, 0, 1), (1, 1, 0), (2, 0, 0)]

    def test_infinite_modules(self):
        """Test the Verma basis ignores the caps."""
        weights = HighestWeights(lambdas=(1, 1))
        assert zero_weight_basis(weights, finite=False) == [(0, 1), (1, 0)]
        assert WeightSpace(HighestWeights(lambdas=(0.5, 1.5)), finite=False).dim == 2

    def test_non_integer_finite_rejected(self):
        """Test finite quotients need integer weights."""
        with pytest.raises(DomainError):
            zero_weight_basis(HighestWeights(lambdas=(0.5, 1.5)))

    def test_weights_and_admissibility(self):
        """Test h-eigenvalues and the caps."""
        assert weight_of(1, 2) == 0
        weights = HighestWeights(lambdas=(2, 2))
        assert is_admissible((2, 0), weights)
        assert not is_admissible((3, 0), weights)

    def test_weight_sums_vanish(self):
        """Test every basis vector has total weight zero."""
        space = WeightSpace(HighestWeights(lambdas=(2, 1, 1)))
        assert_allclose(space.weight_sum(range(3)), np.zeros(space.dim))

    def test_flip(self):
        """Test P reverses the tensor factors."""
        weights = HighestWeights(lambdas=(2, 1, 1))
        assert flip_P({(2, 0, 0): 1.0}, weights) == {(0, 0, 2): 1.0}
        space = WeightSpace(weights)
        P = space.flip_matrix()
        assert_allclose(P.sum(axis=0), np.ones(space.dim))


class TestRMatrix:
    """Test the fundamental dynamical R-matrix."""

    def test_ice_rule(self):
        """Test R_{1,1} preserves the weight."""
        R = RMatrix(ETA).r11(0.17 + 0.05j, np.array([0.23 + 0.07j]), TAU)[0]
        assert R[0, 0] == 1 and R[3, 3] == 1
        assert_allclose(R[0, 1:], np.zeros(3))
        assert_allclose(R[1:3, 0], np.zeros(2))

    def test_zero_eta_rejected(self):
        """Test eta = 0 is refused."""
        with pytest.raises(DomainError):
            RMatrix(0.0)

    def test_calibrated_unitarity(self):
        """Test the calibrated convention satisfies unitarity for the fundamental matrix."""
        r_conv, f_conv, scores = calibrate_convention(ETA, TAU, seed=3)
        assert scores["fundamental"] < 1e-9
        R = RMatrix(ETA, r_conv, f_conv)
        assert R.unitarity_residual(1, 1, 0.21 - 0.04j, np.array([0.19 + 0.03j]), TAU) < 1e-9

    @pytest.mark.parametrize("L1,L2", [(2, 1), (1, 2), (2, 2)])
    def test_fused_pairs(self, L1, L2):
        """Test fused R-matrices have the right size, are unitary and preserve the symmetric submodules."""
        R = calibrated(ETA, TAU)
        value = r_fused(L1, L2, 0.17 + 0.05j, 0.23 + 0.07j, TAU, ETA)
        assert value.matrix.shape == ((L1 + 1) * (L2 + 1), (L1 + 1) * (L2 + 1))
        lam = np.array([0.23 + 0.07j, -0.11 + 0.04j])
        assert R.unitarity_residual(L1, L2, 0.17 + 0.05j, lam, TAU) < 1e-9
        assert R.submodule_residual(L1, L2, 0.17 + 0.05j, lam, TAU) < 1e-9

    def test_calibrated_is_shared(self):
        """Test the calibrated instance is built once per (eta, tau) and matches the calibration."""
        assert calibrated(ETA, TAU) is calibrated(ETA, TAU)
        r_conv, f_conv, _ = calibrate_convention(ETA, TAU)
        R = calibrated(ETA, TAU)
        assert (R.convention, R.fusion) == (r_conv, f_conv)

    def test_module_helpers_use_calibration(self):
        """Test the module-level Yang-Baxter residual is small for fused weights."""
        zs = [0.11 + 0.02j, -0.07 + 0.03j, 0.19 - 0.04j]
        assert dybe_residual((2, 1, 1), zs, 0.21 + 0.05j, TAU, ETA) < 1e-9


class TestShapovalov:
    """Test the Shapovalov weights Q_k."""

    def test_trivial_weight(self):
        """Test Q_0 = 1."""
        mu = np.array([0.1 + 0.02j, 0.3 - 0.05j])
        assert_allclose(q_single(0, 2.0, mu, TAU, ETA), np.ones(2))

    def test_vanishes_past_highest_weight(self):
        """Test Q_k = 0 for k >= Lambda + 1 while Q_Lambda does not vanish."""
        mu = 0.21 + 0.04j
        top = abs(q_single(2, 2.0, mu, TAU, ETA))
        assert top > 1e-6
        assert abs(q_single(3, 2.0, mu, TAU, ETA)) < 1e-10 * max(top, 1.0)

    def test_negative_k_rejected(self):
        """Test k < 0 is refused."""
        with pytest.raises(DomainError):
            q_single(-1, 2.0, 0.1, TAU, ETA)

    def test_tensor_shape(self):
        """Test one column per basis vector."""
        weights = HighestWeights(lambdas=(1, 1))
        values = q_tensor([0.1 + 0.02j, 0.2], TAU, weights, ETA)
        assert values.shape == (2, 2)

    @pytest.mark.parametrize("lambdas", [(1, 3), (2, 1, 1)])
    def test_admissibility_matches_vanishing(self, lambdas):
        """Test Q_I vanishes exactly on the inadmissible Verma indices."""
        weights = HighestWeights(lambdas=lambdas)
        mu = np.array([0.21 + 0.04j, -0.17 + 0.06j])
        assert admissibility_mismatches(weights, mu, TAU, ETA) == []
        values = np.abs(q_tensor(mu, TAU, weights, ETA, finite=False))
        basis = WeightSpace(weights, finite=False).basis
        inadmissible = [k for k, I in enumerate(basis) if not is_admissible(I, weights)]
        assert inadmissible
        assert values[:, inadmissible].max() < 1e-10 * values.max()

"""Tests for the conformal-block spaces, the heat kernels and the modular cocycle."""

import pytest
import numpy as np
from pathlib import Path
import sys

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from core.exceptions import DomainError
from core.models import ModularElement
from stages.blocks.kernels import (
    M_operator,
    gaussian_normalization,
    heat_modulus,
    heat_T_kappa0,
    heat_T_kappa_m,
    theta_identity_residual,
    vanishing_residual,
)
from stages.blocks.modular import READINGS, cocycle_psi, cocycle_residual, reading_summary
from stages.blocks.semiclassical import FIT_ETAS, semiclassical_residual
from stages.blocks.spaces import (
    SAMPLE_POINTS,
    dim_E,
    e_space_basis,
    e_space_rank,
    horizontal_section,
    invariant_theta,
    invariant_theta_residual,
    kzb_connection,
    membership_residual,
    odd_theta,
)

TAU = 0.9j
ETA = -0.05j
S = ModularElement(a=0, b=-1, c=1, d=0)
T = ModularElement(a=1, b=1, c=0, d=1)


def sample_section(lam):
    return np.exp(0.4 * lam) + 0.3 * lam * lam


class TestSpaces:
    """Test the spaces E_{kappa,2m,eta}."""

    @pytest.mark.parametrize("kappa,m,expected", [(4, 0, 3), (5, 1, 2), (6, 1, 3), (3, 1, 0), (4, 1, 1)])
    def test_dimension(self, kappa, m, expected):
        """Test dim E = kappa - 2m - 1 above the threshold, 0 below."""
        assert dim_E(kappa, m) == expected
        assert len(e_space_basis(kappa, m, ETA, TAU)) == expected

    def test_negative_rejected(self):
        """Test negative data is refused."""
        with pytest.raises(DomainError):
            dim_E(-1, 0)

    def test_basis_is_independent(self):
        """Test the sampled basis has full rank."""
        assert e_space_rank(4, 0, ETA, TAU) == 3
        assert e_space_rank(5, 1, ETA, TAU) == 2

    @pytest.mark.parametrize("kappa,m", [(4, 0), (5, 1)])
    def test_basis_membership(self, kappa, m):
        """Test every basis element satisfies the defining conditions."""
        for f in e_space_basis(kappa, m, ETA, TAU):
            assert membership_residual(kappa, m, ETA, TAU, f) < 1e-8

    def test_odd_theta_membership(self):
        """Test odd level-kappa thetas lie in E_{kappa,0}."""
        for j in range(1, 4):
            assert membership_residual(4, 0, ETA, TAU, odd_theta(j, 4, TAU)) < 1e-8

    def test_generic_function_fails_membership(self):
        """Test a generic function is not in the space."""
        assert membership_residual(4, 0, ETA, TAU, sample_section) > 1e-2


class TestHorizontalSections:
    """Test the KZB connection at m = 0."""

    def test_sections_are_flat(self):
        """Test eta(tau) times odd thetas is annihilated."""
        lam = 0.19 + 0.06j
        for j in range(3):
            section = horizontal_section(j, 4, 1)
            assert abs(kzb_connection(4, 0, section, lam, TAU)) / abs(section(lam, TAU)) < 1e-5

    def test_index_range(self):
        """Test indices outside 0..kappa-2 are refused."""
        with pytest.raises(DomainError):
            horizontal_section(3, 4)


class TestHeatKernels:
    """Test the Gaussian heat operator on level-kappa thetas."""

    def test_conventions(self):
        """Test both readings of the heat step."""
        assert heat_modulus(4, ETA, TAU, "minus_2_eta_kappa") == pytest.approx(-8 * ETA)
        assert heat_modulus(4, ETA, TAU, "tau_minus_2_eta_kappa") == pytest.approx(TAU - 8 * ETA)
        with pytest.raises(DomainError):
            heat_modulus(4, ETA, TAU, "other")

    def test_normalization_squares(self):
        """Test (i/sqrt(4 i eta))^2 = -1/(4 i eta)."""
        assert gaussian_normalization(ETA) ** 2 == pytest.approx(-1 / (4j * ETA))

    def test_theta_identity(self):
        """Test T_{kappa,0} maps theta_{j,kappa} at tau - 2 eta kappa to theta_{j,kappa} at tau."""
        assert max(theta_identity_residual(j, 4, ETA, TAU) for j in range(8)) < 1e-6

    def test_constants_are_fixed_far_from_the_real_axis(self):
        """Test the normalized T_{kappa,0} of the constant 1 is 1, also at lambda with |Im lambda| = 2 Im tau."""
        lam = np.array([0.1, 0.1 + 1.8j, -0.3 - 1.8j, 2.0 + 1.8j])
        image = heat_T_kappa0(4, ETA, TAU, lambda x: np.ones_like(np.asarray(x, dtype=complex)))(lam)
        np.testing.assert_allclose(image, np.ones(lam.size), rtol=1e-9)

    def test_T1_maps_into_E(self):
        """Test T_{4,1} maps E_{4,2,eta}(tau - 8 eta) into E_{4,2,eta}(tau), zeros included."""
        sigma = TAU + heat_modulus(4, ETA, TAU)
        (f,) = e_space_basis(4, 1, ETA, sigma)
        image = heat_T_kappa_m(4, 1, ETA, TAU, f)
        assert membership_residual(4, 1, ETA, TAU, image) < 1e-6
        assert vanishing_residual(image, ETA, TAU) < 1e-6

    def test_M_maps_into_invariant_thetas(self):
        """Test M(tau) sends even level-1 thetas at tau - 10 eta to even level-1 thetas at tau."""
        sigma = TAU + heat_modulus(5, ETA, TAU)
        for j in range(2):
            image = M_operator(1, 5, ETA, TAU, invariant_theta(j, 1, sigma))
            assert invariant_theta_residual(1, image, TAU) < 1e-6


class TestSemiclassical:
    """Test the small-eta expansion of the n=1, Lambda=2 heat equation."""

    def test_fit_sequence(self):
        """Test the fit runs along Im eta < 0 with decreasing |eta|."""
        assert all(e.imag < 0 for e in FIT_ETAS)
        assert all(abs(a) > abs(b) for a, b in zip(FIT_ETAS, FIT_ETAS[1:]))

    def test_leading_term_and_constant(self):
        """Test the O(1) term is v_0 and the fitted c does not depend on lambda."""
        report = semiclassical_residual(4, TAU)
        assert report.leading_residual < 1e-4
        assert report.c_spread < 1e-2


class TestCocycle:
    """Test the SL(2, Z) multipliers."""

    def test_identity_acts_trivially(self):
        """Test psi of the identity is the identity."""
        one = ModularElement(a=1, b=0, c=0, d=1)
        for reading in READINGS:
            image = cocycle_psi(one, 4, TAU, sample_section, reading)(SAMPLE_POINTS)
            np.testing.assert_allclose(image, sample_section(SAMPLE_POINTS), rtol=1e-14)

    @pytest.mark.parametrize("g,h", [(S, T), (T, S), (S, S)])
    def test_tau_reading_is_a_cocycle(self, g, h):
        """Test psi_{gh} = psi_g(h tau) psi_h(tau) in the tau reading."""
        assert cocycle_residual(g, h, 4, 0.13 + 0.9j, sample_section, "tau") < 1e-10

    def test_summary_reports_every_reading(self):
        """Test the summary has one entry per reading and the tau reading inverts the section rule."""
        summary = reading_summary(4, 0.13 + 0.9j, sample_section)
        assert set(summary) == set(READINGS)
        assert summary["tau"]["cocycle"] < 1e-10
        assert summary["tau"]["inverse"] < 1e-10

    def test_unknown_reading(self):
        """Test unknown readings are refused."""
        with pytest.raises(DomainError):
            cocycle_psi(S, 4, TAU, sample_section, "other")

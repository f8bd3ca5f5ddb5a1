"""Tests for theta functions, Weierstrass p, Dedekind eta, the phase function and Gauss sums."""

import pytest
import numpy as np
from numpy.testing import assert_allclose
from pathlib import Path
import sys

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from core.exceptions import DomainError, PoleError, SingularParameterError
from stages.integrals.rational import gauss_sum, rational_constant
from stages.special.phase import functional_equation_residual, omega_phase, symmetry_residual
from stages.special.theta import (
    addition_residual,
    alpha_gauss,
    check_modulus,
    dedekind_eta,
    level_heat_residual,
    theta,
    theta_level,
    theta_prime,
    theta_shift_residuals,
    weierstrass_p,
    weierstrass_p_lattice,
)

TAU = 0.9j
POINTS = np.array([0.13 + 0.04j, -0.27 + 0.11j, 0.41 - 0.09j, 0.05 + 0.2j])


class TestTheta:
    """Test the odd Jacobi theta function."""

    def test_vanishes_at_origin(self):
        """Test theta(0) = 0."""
        assert abs(theta(0.0, TAU)) < 1e-13

    def test_odd(self):
        """Test theta(-t) = -theta(t)."""
        assert_allclose(theta(-POINTS, TAU), -theta(POINTS, TAU), rtol=1e-12, atol=1e-14)

    def test_scalar_in_scalar_out(self):
        """Test scalar arguments return a Python complex."""
        assert isinstance(theta(0.2, TAU), complex)
        assert theta(POINTS, TAU).shape == POINTS.shape

    def test_shift_residuals(self):
        """Test oddness and quasi-periodicity residuals."""
        residuals = theta_shift_residuals(POINTS, 0.13 + 0.9j)
        assert set(residuals) == {"odd", "period_2", "period_2tau"}
        assert max(residuals.values()) < 1e-10

    def test_prime_matches_difference_quotient(self):
        """Test the term-wise derivative against a central difference."""
        h = 1e-6
        fd = (theta(POINTS + h, TAU) - theta(POINTS - h, TAU)) / (2 * h)
        assert_allclose(theta_prime(POINTS, TAU), fd, rtol=1e-7)

    def test_lower_half_plane_rejected(self):
        """Test Im tau <= 0 is refused."""
        with pytest.raises(DomainError):
            check_modulus(-0.5j)

    def test_level_reflection(self):
        """Test theta_{j,kappa}(-lambda) = theta_{-j,kappa}(lambda)."""
        for j in range(8):
            assert_allclose(theta_level(j, 4, -POINTS, TAU), theta_level(-j, 4, POINTS, TAU), rtol=1e-10)

    def test_shift_residuals_far_from_real_axis(self):
        """Test the 2 tau shift stays relative to its own size when theta(t + 2 tau) is large."""
        far = np.array([0.3 + 0.4j, -0.2 + 0.45j, 0.1 - 0.3j])
        assert theta_shift_residuals(far, 0.13 + 0.9j)["period_2tau"] < 1e-11

    def test_level_heat(self):
        """Test 2 pi i kappa d_tau theta_{j,kappa} = d_lambda^2 theta_{j,kappa} for every j."""
        for j in range(4):
            for lam in (0.17 + 0.05j, -0.31 + 0.12j, 0.0):
                assert level_heat_residual(j, 4, lam, TAU) < 1e-8

    def test_level_lambda_derivative(self):
        """Test the term-wise lambda derivative against a central difference."""
        h = 1e-6
        fd = (theta_level(1, 4, POINTS + h, TAU) - theta_level(1, 4, POINTS - h, TAU)) / (2 * h)
        assert_allclose(theta_level(1, 4, POINTS, TAU, order=1), fd, rtol=1e-7)

    def test_level_needs_positive_kappa(self):
        """Test theta_{j,0} is refused."""
        with pytest.raises(DomainError):
            theta_level(0, 0, 0.1, TAU)


class TestWeierstrass:
    """Test Weierstrass p."""

    def test_double_pole(self):
        """Test t^2 p(t) -> 1."""
        t = 1e-2
        assert abs(t * t * weierstrass_p(t, TAU) - 1) < 1e-4

    def test_even(self):
        """Test p(-t) = p(t)."""
        assert_allclose(weierstrass_p(-POINTS, TAU), weierstrass_p(POINTS, TAU), rtol=1e-9)

    def test_lattice_sum_agrees(self):
        """Test the theta formula against the symmetric lattice sum."""
        for t in POINTS[:2]:
            direct = weierstrass_p(t, TAU)
            assert abs(direct - weierstrass_p_lattice(t, TAU)) / abs(direct) < 1e-11

    def test_lattice_sum_periodic(self):
        """Test the lattice sum is invariant under t -> t + 1 and t -> t + tau."""
        t = 0.21 + 0.13j
        base = weierstrass_p_lattice(t, 0.13 + 0.9j)
        assert abs(weierstrass_p_lattice(t + 1, 0.13 + 0.9j) - base) < 1e-11 * abs(base)
        assert abs(weierstrass_p_lattice(t + 0.13 + 0.9j, 0.13 + 0.9j) - base) < 1e-11 * abs(base)

    def test_addition_identity(self):
        """Test the theta quotient against p(lambda) - p(t)."""
        grid = [0.11 + 0.07j, 0.2 + 0.1j, 0.29 - 0.04j, 0.37, 0.43 + 0.17j]
        worst = max(addition_residual(t, lam, TAU) for t in grid for lam in grid[::-1] if abs(t - lam) > 1e-3)
        assert worst < 1e-10

    def test_lattice_point_raises(self):
        """Test the lattice sum refuses a lattice point."""
        with pytest.raises(PoleError):
            weierstrass_p_lattice(1.0, TAU)


class TestDedekindEta:
    """Test the Dedekind eta function."""

    def test_product(self):
        """Test against the truncated product formula."""
        tau = 0.1 + 1.1j
        q = np.exp(2j * np.pi * tau)
        direct = np.exp(np.pi * 1j * tau / 12) * np.prod(1 - q ** np.arange(1, 80))
        assert abs(dedekind_eta(tau) - direct) < 1e-13

    def test_alpha_needs_nonzero_eta(self):
        """Test alpha(lambda) refuses eta = 0."""
        with pytest.raises(DomainError):
            alpha_gauss(0.3, 0.0)


class TestPhaseFunction:
    """Test the phase function Omega_a."""

    def test_trivial_at_zero(self):
        """Test Omega_0 = 1."""
        z = np.array([0.1 + 0.05j, -0.3 + 0.02j])
        assert_allclose(omega_phase(0.0, z, TAU, 0.7j), np.ones(2), atol=1e-14)

    def test_functional_equation(self):
        """Test the p-shift functional equation."""
        assert functional_equation_residual(-0.1j, 0.17 + 0.03j, TAU, 0.7j) < 1e-10

    def test_symmetry(self):
        """Test the tau <-> p symmetry of the product."""
        assert symmetry_residual(-0.1j, 0.17 + 0.03j, TAU, 0.7j) < 1e-10

    def test_pole_raises(self):
        """Test a vanishing denominator factor is reported."""
        with pytest.raises(SingularParameterError) as excinfo:
            omega_phase(0.1, -0.1, TAU, 0.7j)
        assert excinfo.value.factor is not None


class TestGaussSum:
    """Test the quadratic Gauss sums."""

    def test_value_at_four(self):
        """Test S(4) = 2 - 2i."""
        assert abs(gauss_sum(4) - (2 - 2j)) < 1e-12

    @pytest.mark.parametrize("N", [1, 2, 3, 7, 16, 33])
    def test_closed_form(self, N):
        """Test S(N) = (1 - i) sqrt(N)."""
        assert abs(gauss_sum(N) - (1 - 1j) * np.sqrt(N)) < 1e-11

    def test_rational_constant(self):
        """Test C_N = i e^{2 pi i/N}/S(N)."""
        assert abs(rational_constant(4) - 1j * 1j / (2 - 2j)) < 1e-12

    def test_rejects_nonpositive(self):
        """Test N >= 1 is required."""
        with pytest.raises(DomainError):
            gauss_sum(0)

"""Suites for Gauss sums and the scalar special functions."""

import numpy as np

from pipelines.base import BaseSuite
from stages.integrals.rational import gauss_sum
from stages.special.phase import functional_equation_residual, omega_phase, symmetry_residual
from stages.special.theta import (
    addition_residual,
    dedekind_eta,
    level_heat_residual,
    theta,
    theta_derivative,
    theta_level,
    theta_prime,
    theta_shift_residuals,
    weierstrass_p,
    weierstrass_p_lattice,
)


class GaussSumSuite(BaseSuite):
    """S(N) against (1 - i) sqrt(N)."""

    tolerances = {"gauss-closed-form": 1e-12}
    defaults = {"N": 50}

    def __init__(self, config=None):
        super().__init__(name="gauss-sums", config=config)

    def execute(self):
        top = int(self.parameters["N"])
        self.log(f"Checking N = 1..{top}")
        for N in range(1, top + 1):
            self.check(f"gauss-closed-form[N={N}]", lambda N=N: abs(gauss_sum(N) - (1 - 1j) * np.sqrt(N)),
                       tolerance=self.tolerances["gauss-closed-form"])


class SpecialFunctionSuite(BaseSuite):
    """Theta, Weierstrass, Dedekind eta, phase function and level-kappa thetas."""

    tolerances = {
        "theta-shifts": 1e-10,
        "theta-prime-fd": 1e-8,
        "wp-theta-identity": 1e-10,
        "wp-laurent": 1e-4,
        "wp-lattice": 1e-10,
        "dedekind-product": 1e-12,
        "omega-functional-equation": 1e-10,
        "omega-symmetry": 1e-10,
        "omega-zero": 1e-14,
        "level-reflection": 1e-10,
        "level-heat": 1e-6,
    }
    defaults = {"tau": 0.9j, "p": 0.7j, "eta": -0.05j, "kappa": 4}
    draws = 20

    def __init__(self, config=None):
        super().__init__(name="special", config=config)

    def execute(self):
        params = self.parameters
        tau, p, eta, kappa = complex(params["tau"]), complex(params["p"]), complex(params["eta"]), int(params["kappa"])
        points = self.generic(0.45, self.draws)

        def shifts():
            out = theta_shift_residuals(points, tau)
            self.note("theta-shifts", out)
            return max(out.values())

        self.check("theta-shifts", shifts)

        def theta_prime_fd():
            h = 1e-6
            fd = (theta(points + h, tau) - theta(points - h, tau)) / (2 * h)
            exact = theta_prime(points, tau)
            return float(np.max(np.abs(fd - exact)) / np.max(np.abs(exact)))

        self.check("theta-prime-fd", theta_prime_fd)

        grid = [0.11 + 0.07j, 0.2 + 0.1j, 0.29 - 0.04j, 0.37, 0.43 + 0.17j]
        self.check("wp-theta-identity", lambda: max(
            addition_residual(t, lam, tau) for t in grid for lam in grid[::-1] if abs(t - lam) > 1e-3
        ))
        self.check("wp-laurent", lambda: max(abs(t * t * weierstrass_p(t, tau) - 1) for t in (1e-2, 1e-3, 1e-4)))
        self.check("wp-lattice", lambda: max(
            abs(weierstrass_p(t, tau) - weierstrass_p_lattice(t, tau)) / abs(weierstrass_p(t, tau)) for t in grid
        ))

        def dedekind():
            q = np.exp(2j * np.pi * tau)
            direct = np.exp(np.pi * 1j * tau / 12) * np.prod(1 - q ** np.arange(1, 101))
            return abs(dedekind_eta(tau) - direct)

        self.check("dedekind-product", dedekind)

        a = 2 * eta
        zs = self.generic(0.4, self.draws)
        self.check("omega-functional-equation",
                   lambda: max(functional_equation_residual(a, z, tau, p) for z in zs))
        self.check("omega-symmetry", lambda: max(symmetry_residual(a, z, tau, p) for z in zs))
        self.check("omega-zero", lambda: float(np.max(np.abs(omega_phase(0.0, zs, tau, p) - 1))))

        lam = self.generic(0.4, 5)
        self.check("level-reflection", lambda: max(
            float(np.max(np.abs(theta_level(j, kappa, -lam, tau) - theta_level(-j, kappa, lam, tau))))
            / float(np.max(np.abs(theta_level(j, kappa, lam, tau))))
            for j in range(2 * kappa)
        ))
        self.check("level-heat", lambda: max(level_heat_residual(j, kappa, x, tau) for j in range(kappa) for x in lam[:3]))
        self.note("theta_triple_derivative_at_zero", complex(theta_derivative(0.0, tau, order=3)))

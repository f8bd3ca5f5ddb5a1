"""Suites for the conformal-block spaces and the small-eta expansion."""

import numpy as np

from core.exceptions import QkzbError
from pipelines.base import BaseSuite
from stages.blocks.kernels import (
    M_operator,
    heat_modulus,
    heat_T_kappa_m,
    kernel_consistency,
    kernel_V_residue,
    projective_horizontality,
    theta_identity_residual,
    vanishing_residual,
)
from stages.blocks.modular import reading_summary
from stages.blocks.spaces import (
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
from stages.blocks.semiclassical import (
    default_gaussian_test,
    gaussian_asymptotics,
    heat_remainder_ratios,
    horizontal_test_family,
    omega_tilde_limit,
    semiclassical_residual,
)
from stages.integrals.hyperfun import residue_split


class BlocksSuite(BaseSuite):
    """Theta spaces, the spaces E_{kappa,2m,eta}, T_{kappa,m}, the kernels V and M and the cocycle."""

    tolerances = {
        "theta-identity": 1e-8,
        "projective-horizontality": 1e-6,
        "dimension": 0.5,
        "basis-membership": 1e-9,
        "odd-membership": 1e-9,
        "horizontal-sections": 1e-5,
        "T1-membership": 1e-6,
        "T1-vanishing": 1e-6,
        "V-residue[0,0]": 1e-7,
        "V-residue[0,1]": 1e-6,
        "M-membership": 1e-6,
        "M-V-consistency": 1e-5,
        "cocycle": 1e-9,
    }
    defaults = {"tau": 0.9j, "eta": -0.05j, "kappa": 4}

    def __init__(self, config=None):
        super().__init__(name="blocks", config=config)

    def execute(self):
        params = self.parameters
        tau, eta, kappa = complex(params["tau"]), complex(params["eta"]), int(params["kappa"])
        sigma = tau + heat_modulus(kappa, eta, tau)

        self.check("theta-identity", lambda: max(theta_identity_residual(j, kappa, eta, tau) for j in range(2 * kappa)))

        def horizontality():
            out = projective_horizontality(kappa, 1, eta, tau)
            self.note("projective_constant", out["constant"])
            return out["spread"]

        self.check("projective-horizontality", horizontality)

        ranks = {}

        def dimension():
            worst = 0
            for k, m in ((4, 0), (5, 1), (6, 1)):
                ranks[f"{k},{m}"] = e_space_rank(k, m, eta, tau)
                worst = max(worst, abs(ranks[f"{k},{m}"] - dim_E(k, m)))
            self.note("e_space_ranks", ranks)
            return worst

        self.check("dimension", dimension)
        self.check("basis-membership", lambda: max(
            membership_residual(k, m, eta, tau, f) for k, m in ((4, 0), (5, 1)) for f in e_space_basis(k, m, eta, tau)
        ))
        self.check("odd-membership", lambda: max(
            membership_residual(kappa, 0, eta, tau, odd_theta(j, kappa, tau)) for j in range(1, kappa)
        ))

        lam = 0.19 + 0.06j
        self.check("horizontal-sections", lambda: max(
            abs(kzb_connection(kappa, 0, horizontal_section(j, kappa, 1), lam, tau))
            / abs(horizontal_section(j, kappa, 1)(lam, tau))
            for j in range(kappa - 1)
        ))
        self.note("horizontal_inverse_eta_defect", max(
            abs(kzb_connection(kappa, 0, horizontal_section(j, kappa, -1), lam, tau))
            / abs(horizontal_section(j, kappa, -1)(lam, tau))
            for j in range(kappa - 1)
        ))

        level = max(kappa, 4)
        images = []

        def t1_membership():
            basis = e_space_basis(level, 1, eta, sigma)
            images.extend(heat_T_kappa_m(level, 1, eta, tau, f) for f in basis)
            return max(membership_residual(level, 1, eta, tau, image) for image in images)

        self.check("T1-membership", t1_membership)
        self.check("T1-vanishing", lambda: max(vanishing_residual(image, eta, tau) for image in images)
                   if images else float("nan"))

        mu = 0.23 - 0.08j
        self.check("V-residue[0,0]", lambda: kernel_V_residue(mu, tau, sigma, eta, 0, 0))
        self.check("V-residue[0,1]", lambda: kernel_V_residue(mu, tau, sigma, eta, 0, 1))
        self.note("V-residue[0,0]_mirrored", _safe(lambda: kernel_V_residue(mu, tau, sigma, eta, 0, 0, "mirrored")))

        def m_membership():
            m, k = 1, 5
            target = k - 2 * m - 2
            k_sigma = tau + heat_modulus(k, eta, tau)
            return max(
                invariant_theta_residual(target, M_operator(m, k, eta, tau, invariant_theta(j, target, k_sigma)), tau)
                for j in range(target + 1)
            )

        self.check("M-membership", m_membership)

        def consistency():
            out = kernel_consistency([0.17 + 0.05j, -0.26 + 0.11j], [0.31 - 0.04j, 0.08 + 0.13j], tau, sigma, eta)
            self.note("M_over_V_constant", out["mean"])
            return out["spread"]

        self.check("M-V-consistency", consistency)

        def cocycle():
            summary = reading_summary(kappa, tau, lambda x: np.exp(0.4 * x) + 0.3 * x * x)
            self.note("psi_readings", summary)
            passing = [r for r, s in summary.items() if s["cocycle"] < self.tolerance("cocycle")]
            self.note("psi_reading_passing_cocycle", passing)
            return min(s["cocycle"] for s in summary.values())

        self.check("cocycle", cocycle)


class SemiclassicalSuite(BaseSuite):
    """Small-eta expansion of the n=1, Lambda=2 heat equation."""

    tolerances = {
        "leading-term": 1e-4,
        "c-spread": 1e-2,
        "gaussian-slope": 0.2,
        "residue-split": 1e-8,
        "omega-tilde-limit": 1e-2,
        "heat-remainder-spread": 1e-3,
        "heat-remainder-value": 1e-3,
    }
    defaults = {"tau": 0.9j, "kappa": 4, "eta": -0.05j}

    def __init__(self, config=None):
        super().__init__(name="semiclassical", config=config)

    def execute(self):
        params = self.parameters
        tau, kappa, eta = complex(params["tau"]), int(params["kappa"]), complex(params["eta"])
        expansion = {}

        def leading():
            report = semiclassical_residual(kappa, tau)
            expansion["report"] = report
            self.note("c_values", report.c_values)
            self.note("eta_function_value", report.eta_function_value)
            return report.leading_residual

        self.check("leading-term", leading)
        self.check("c-spread", lambda: expansion["report"].c_spread if expansion else float("nan"))

        def slope():
            out = gaussian_asymptotics(default_gaussian_test, 0.17 + 0.04j)
            self.note("gaussian_remainders", out["remainders"])
            return abs(out["slope"] - 2.0)

        self.check("gaussian-slope", slope)

        def split():
            out = residue_split(0.21 + 0.03j, -0.14 + 0.06j, tau, tau - 2 * kappa * eta, eta)
            return abs(out["split"] - out["direct"]) / abs(out["direct"])

        self.check("residue-split", split)

        def limit():
            values = omega_tilde_limit(kappa, tau)
            self.note("omega_tilde_deviation", values)
            return values[-1]

        self.check("omega-tilde-limit", limit)

        family = {}

        def remainder_spread():
            k, v, expected = horizontal_test_family(tau)
            ratios = heat_remainder_ratios(k, v, tau)
            family.update(mean=complex(np.mean(ratios)), expected=expected)
            return float(np.max(np.abs(ratios - family["mean"])) / max(abs(family["mean"]), 1.0))

        self.check("heat-remainder-spread", remainder_spread)
        self.check("heat-remainder-value", lambda: abs(family["mean"] - family["expected"]) / max(abs(family["expected"]), 1.0)
                   if family else float("nan"))


def _safe(compute):
    try:
        return compute()
    except QkzbError as e:
        return str(e)

"""Suites for the hypergeometric integrals, the heat operators and the composition conjecture."""

import numpy as np

from core.models import HighestWeights
from pipelines.base import BaseSuite
from stages.algebra.weights import WeightSpace
from stages.integrals.heat import conjecture_ratio, lemma17_residual, theorem1_residual, theorem1_vee_residual
from stages.integrals.hyperfun import (
    HypergeometricFunction,
    contour_shift_residual,
    lambda_mu_symmetry_residual,
    multiplier_residuals,
    qkzb_system_residual,
    quadrature_stability,
    residue_split,
    sigma_translation_residual,
)
from stages.integrals.rational import (
    RationalHeatOperator,
    compatibility_residual,
    periodicity_residual,
    rational_conjecture_residual,
    u_hat_regularity,
)
from stages.integrals.shapovalov import VANISHING_NOTE, lemma15_residual, translation_residual


class HypergeometricSuite(BaseSuite):
    """The difference system of u for n=1, Lambda=2 and n=2, Lambda=(1,1), and the quadrature diagnostics."""

    tolerances = {
        "system[p-shift]": 1e-6,
        "system[tau-shift]": 1e-6,
        "system[period]": 1e-6,
        "quadrature-doubling": 1e-9,
        "contour-height": 1e-8,
        "true-solution-multipliers": 1e-6,
        "residue-split": 1e-8,
        "sigma-translation": 1e-8,
        "lambda-mu-symmetry": 1e-8,
        "system-n2[p-shift]": 1e-6,
        "system-n2[tau-shift]": 1e-6,
    }
    defaults = {"tau": 0.13 + 0.9j, "p": 0.07 + 0.7j, "eta": -0.05j, "zs_n2": (0.11 + 0.02j, -0.23 + 0.05j)}

    def __init__(self, config=None):
        super().__init__(name="hyperfun", config=config)

    def execute(self):
        params = self.parameters
        tau, p, eta = complex(params["tau"]), complex(params["p"]), complex(params["eta"])
        weights = HighestWeights(lambdas=(2.0,))
        zs = (0j,)
        lam = self.generic(0.3, 2)
        mu = self.generic(0.3, 2)
        hf = HypergeometricFunction(zs, tau, p, weights, eta)
        hf.quadrature()
        self.note("quadrature_method", hf.method)

        for which in ("p-shift", "tau-shift", "period"):
            self.check(f"system[{which}]", lambda which=which: qkzb_system_residual(
                which, 0, zs, lam, mu, tau, p, weights, eta, hf=hf
            ))
        self.check("quadrature-doubling", lambda: quadrature_stability(hf, lam, mu))
        self.check("contour-height", lambda: contour_shift_residual(hf, lam, mu))
        self.check("true-solution-multipliers", lambda: max(
            multiplier_residuals((1,), mu[0], zs, lam[0], tau, p, weights, eta).values()
        ))

        def split():
            out = residue_split(lam[0], mu[0], tau, p, eta)
            return abs(out["split"] - out["direct"]) / abs(out["direct"])

        self.check("residue-split", split)
        self.check("sigma-translation", lambda: sigma_translation_residual(mu[0], tau, p, eta))
        self.check("lambda-mu-symmetry", lambda: lambda_mu_symmetry_residual(lam[0], mu[0], tau, p, eta))

        pair = HighestWeights(lambdas=(1.0, 1.0))
        pair_zs = tuple(complex(z) for z in params["zs_n2"])
        pair_hf = HypergeometricFunction(pair_zs, tau, p, pair, eta)
        for which in ("p-shift", "tau-shift"):
            self.check(f"system-n2[{which}]", lambda which=which: max(
                qkzb_system_residual(which, j, pair_zs, lam, mu, tau, p, pair, eta, hf=pair_hf) for j in range(2)
            ))


class HeatSuite(BaseSuite):
    """Compatibility of T and T^vee with the qKZB operators, Shapovalov identities and T_N on F_N."""

    tolerances = {
        "theorem[T]": 1e-5,
        "theorem[T_vee]": 1e-5,
        "shapovalov-symmetry[1,1]": 1e-6,
        "shapovalov-symmetry[2,1]": 1e-6,
        "adjoint[K]": 1e-6,
        "adjoint[K_vee]": 1e-6,
        "pairing-translation": 1e-6,
        "rational-compatibility": 1e-8,
        "rational-periodicity": 1e-8,
    }
    defaults = {"tau": 0.13 + 0.9j, "p": 0.07 + 0.7j, "eta": -0.05j, "N": 5,
                "lambdas": (1.0, 1.0), "zs": (0.11 + 0.02j, -0.23 + 0.05j)}

    def __init__(self, config=None):
        super().__init__(name="heat", config=config)

    def execute(self):
        params = self.parameters
        tau, p, eta, N = complex(params["tau"]), complex(params["p"]), complex(params["eta"]), int(params["N"])
        weights = HighestWeights(lambdas=tuple(params["lambdas"]))
        zs = tuple(complex(z) for z in params["zs"])
        lam = self.generic(0.3, 2)
        self.note("shapovalov_vanishing", VANISHING_NOTE)

        self.check("theorem[T]", lambda: theorem1_residual(0, zs, tau, p, weights, eta, lam))
        self.check("theorem[T_vee]", lambda: theorem1_vee_residual(0, zs, tau, p, weights, eta, lam))
        for L1, L2 in ((1, 1), (2, 1)):
            self.check(f"shapovalov-symmetry[{L1},{L2}]",
                       lambda L1=L1, L2=L2: lemma15_residual(L1, L2, zs[0], lam, tau, eta))
        for which in ("K", "K_vee"):
            self.check(f"adjoint[{which}]", lambda which=which: lemma17_residual(0, which, zs, tau, p, weights, eta))

        def pairing():
            dim = WeightSpace(weights).dim
            f = lambda x: np.exp(0.3 * np.asarray(x))[:, None] * np.ones((1, dim))
            return translation_residual(f, f, tau + p, weights, eta)

        self.check("pairing-translation", pairing)

        self.check("rational-compatibility", lambda: max(
            compatibility_residual(j, zs, tau, p, N, weights, params.get("epsilon")) for j in range(weights.n)
        ))

        def periodic():
            op = RationalHeatOperator(zs, tau, p, weights, N, params.get("epsilon"))
            v = self.rng.standard_normal(2 * N * op.dim) + 1j * self.rng.standard_normal(2 * N * op.dim)
            return periodicity_residual(op, v)

        self.check("rational-periodicity", periodic)


class ConjectureSuite(BaseSuite):
    """U/u constancy at total weight 2, its rational version and the regularity of the rational kernel."""

    tolerances = {"ratio-spread": 1e-4, "ratio-constant": 1e-3, "rational-composition": 1e-7, "rational-regularity": 1e-3}
    defaults = {"tau": 0.13 + 0.9j, "p": 0.07 + 0.7j, "eta": -0.05j, "N": 3}

    def __init__(self, config=None):
        super().__init__(name="conjecture", config=config)

    def execute(self):
        params = self.parameters
        tau, p, eta, N = complex(params["tau"]), complex(params["p"]), complex(params["eta"]), int(params["N"])
        weights = HighestWeights(lambdas=(2.0,))
        samples = [(self.generic(0.3), self.generic(0.3)) for _ in range(4)]
        stats = {}

        def ratios():
            stats.update(conjecture_ratio((0j,), samples, tau, p, weights, eta))
            self.note("ratio_mean", stats["mean"])
            self.note("ratio_expected", stats["expected"])
            return stats["spread"]

        self.check("ratio-spread", ratios)
        self.check("ratio-constant", lambda: stats["deviation"] if stats else float("nan"))

        def rational():
            out = rational_conjecture_residual(tau, p, N, params.get("epsilon"))
            self.note("rational_constant", out["constant"])
            return out["residual"]

        self.check("rational-composition", rational)
        self.check("rational-regularity", lambda: u_hat_regularity(
            N, (0j,), tau, p, weights, self.generic(0.3), self.generic(0.3)
        ))

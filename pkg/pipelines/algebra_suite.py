"""Suites for the dynamical R-matrices and the qKZB difference operators."""

from core.models import HighestWeights, QkzbConfig
from pipelines.base import BaseSuite
from stages.algebra.qkzb import QkzbOperators
from stages.algebra.rmatrix import RMatrix, calibrate_convention
from stages.integrals.shapovalov import admissibility_mismatches


class RMatrixSuite(BaseSuite):
    """Unitarity, dynamical Yang-Baxter, the tau-shift identity, submodules, regularity at 2 eta = 1/N and admissibility."""

    tolerances = {
        "unitarity[1,1]": 1e-11,
        "unitarity[2,1]": 1e-9,
        "unitarity[2,2]": 1e-9,
        "dybe[1,1,1]": 1e-11,
        "dybe[2,1,1]": 1e-9,
        "dybe[2,2,1]": 1e-9,
        "tau-shift[1,1]": 1e-9,
        "tau-shift[2,1]": 1e-9,
        "regularity[2,1]": 1e-3,
        "fusion-leak[2,1]": 1e-6,
        "submodule[2,1]": 1e-9,
        "submodule[1,2]": 1e-9,
        "submodule[2,2]": 1e-9,
        "admissibility-shapovalov": 0.5,
    }
    defaults = {"tau": 0.13 + 0.9j, "eta": -0.05j, "N": 5, "draws": 20}

    def __init__(self, config=None):
        super().__init__(name="rmatrix", config=config)

    def execute(self):
        params = self.parameters
        tau, eta, N = complex(params["tau"]), complex(params["eta"]), int(params["N"])
        r_conv, f_conv, scores = calibrate_convention(eta, tau, seed=self.seed)
        self.note("r_convention", {"lam_sign": r_conv.lam_sign, "offdiag_sign": r_conv.offdiag_sign})
        self.note("fusion_convention", {"point_sign": f_conv.point_sign, "first_group": f_conv.first_group})
        self.note("calibration_scores", scores)
        R = RMatrix(eta, r_conv, f_conv)

        draws = int(params.get("draws", 20))
        z_draws = self.generic(0.3, draws)
        lam = self.generic(0.3, draws)

        def worst(residual):
            return max(residual(z) for z in z_draws)

        for L1, L2 in ((1, 1), (2, 1), (2, 2)):
            self.check(f"unitarity[{L1},{L2}]",
                       lambda L1=L1, L2=L2: worst(lambda z: R.unitarity_residual(L1, L2, z, lam, tau)))
        triples = self.generic(0.3, 3 * draws).reshape(draws, 3)
        for weights in ((1, 1, 1), (2, 1, 1), (2, 2, 1)):
            name = "dybe[" + ",".join(map(str, weights)) + "]"
            self.check(name, lambda weights=weights: max(R.dybe_residual(weights, zs, lam, tau) for zs in triples))
        for L1, L2 in ((1, 1), (2, 1)):
            self.check(f"tau-shift[{L1},{L2}]",
                       lambda L1=L1, L2=L2: worst(lambda z: R.lemma14_residual(L1, L2, z, lam, tau)))
        for L1, L2 in ((2, 1), (1, 2), (2, 2)):
            self.check(f"submodule[{L1},{L2}]",
                       lambda L1=L1, L2=L2: worst(lambda z: R.submodule_residual(L1, L2, z, lam, tau)))
        self.check("regularity[2,1]", lambda: R.regularity_defect(2, 1, N, z_draws[0], lam[:3], tau))
        self.check("fusion-leak[2,1]", lambda: worst(lambda z: R.fused_with_leak(2, 1, z, lam, tau)[1]))

        def admissibility():
            mu = self.generic(0.3, 4)
            mismatched = {
                ",".join(map(str, w)): admissibility_mismatches(HighestWeights(lambdas=w), mu, tau, eta)
                for w in ((1, 3), (2, 1, 1))
            }
            self.note("admissibility_mismatches", {k: [list(I) for I in v] for k, v in mismatched.items()})
            return float(sum(len(v) for v in mismatched.values()))

        self.check("admissibility-shapovalov", admissibility)


class QkzbSuite(BaseSuite):
    """Exact matrix identities of the qKZB operators on F_N(epsilon)."""

    tolerances = {"compatibility": 1e-9, "compatibility-vee": 1e-9, "mirror": 1e-9, "inverse": 1e-9,
                  "step-shift[K]": 1e-9, "step-shift[K_vee]": 1e-9}
    defaults = {"tau": 0.13 + 0.9j, "p": 0.07 + 0.7j, "N": 5, "lambdas": (1.0, 1.0), "zs": (0.11 + 0.02j, -0.23 + 0.05j)}

    def __init__(self, config=None):
        super().__init__(name="qkzb", config=config)

    def execute(self):
        params = self.parameters
        N = int(params["N"])
        weights = HighestWeights(lambdas=tuple(params["lambdas"]))
        config = QkzbConfig(zs=tuple(params["zs"]), tau=params["tau"], p=params["p"], eta=1 / (2 * N), weights=weights)
        epsilon = params.get("epsilon")
        ops = QkzbOperators(weights, config.eta)
        n = weights.n
        pairs = [(j, l) for j in range(n) for l in range(n) if j < l]
        self.check("compatibility", lambda: max(
            ops.compatibility_residual(j, l, config, N, epsilon=epsilon) for j, l in pairs
        ))
        self.check("compatibility-vee", lambda: max(
            ops.compatibility_residual(j, l, config, N, mirror=True, epsilon=epsilon) for j, l in pairs
        ))
        self.check("mirror", lambda: max(ops.mirror_residual(i, config, N, epsilon) for i in range(n)))
        self.check("inverse", lambda: max(ops.inverse_residual(j, config, N, epsilon) for j in range(n)))
        lam = self.generic(0.3, 2)
        for which in ("K", "K_vee"):
            self.check(f"step-shift[{which}]", lambda which=which: max(
                ops.lemma16_residual(j, config, lam, which) for j in range(n)
            ))

"""SL(2, Z) action on level-kappa sections: the multipliers psi_g and their cocycle."""

import logging
from typing import Dict, Sequence

import numpy as np

from core.exceptions import DomainError
from core.models import ModularElement
from stages.blocks.spaces import SAMPLE_POINTS, LambdaClosure
from utils.numerics import relative_residual

logger = logging.getLogger(__name__)

READINGS = ("literal", "tau")


def cocycle_psi(g: ModularElement, kappa: int, tau: complex, v: LambdaClosure, reading: str = "tau") -> LambdaClosure:
    """
    psi_g(tau) v(lambda) = e^{(pi i kappa/2) c X lambda^2} v((c tau + d) lambda),

    with X = c lambda + d ("literal") or X = c tau + d ("tau").
    """
    if reading not in READINGS:
        raise DomainError(f"unknown psi reading {reading}")
    j = g.automorphy(complex(tau))
    if abs(j) < 1e-14:
        raise DomainError("c tau + d vanishes")

    def image(lam):
        lam = np.asarray(lam, dtype=complex)
        factor = g.c * lam + g.d if reading == "literal" else j
        return np.exp(0.5j * np.pi * kappa * g.c * factor * lam * lam) * np.asarray(v(j * lam), dtype=complex)

    return image


def cocycle_residual(g: ModularElement, h: ModularElement, kappa: int, tau: complex, v: LambdaClosure,
                     reading: str = "tau", lam: Sequence[complex] = SAMPLE_POINTS) -> float:
    """psi_{gh}(tau) v against psi_g(h tau) psi_h(tau) v."""
    lam = np.asarray(lam, dtype=complex)
    lhs = cocycle_psi(g @ h, kappa, tau, v, reading)(lam)
    rhs = cocycle_psi(g, kappa, h.act(tau), cocycle_psi(h, kappa, tau, v, reading), reading)(lam)
    return relative_residual(lhs, rhs)


def section_rule_residual(g: ModularElement, kappa: int, tau: complex, v: LambdaClosure,
                          reading: str = "tau", lam: Sequence[complex] = SAMPLE_POINTS) -> Dict[str, float]:
    """
    Compare the multiplier (psi_g v)(lambda/(c tau + d))/v(lambda) with e^{-pi i kappa c lambda^2/2(c tau + d)}.

    "direct" is the difference of the two; "inverse" measures whether they are reciprocal,
    i.e. whether psi_g undoes the section transformation.
    """
    lam = np.asarray(lam, dtype=complex)
    j = g.automorphy(complex(tau))
    implied = cocycle_psi(g, kappa, tau, v, reading)(lam / j) / np.asarray(v(lam), dtype=complex)
    printed = np.exp(-1j * np.pi * kappa * g.c * lam * lam / (2 * j))
    return {
        "direct": float(np.max(np.abs(implied - printed))),
        "inverse": float(np.max(np.abs(implied * printed - 1.0))),
    }


def reading_summary(kappa: int, tau: complex, v: LambdaClosure,
                    pairs: Sequence = ()) -> Dict[str, Dict[str, float]]:
    """Worst cocycle and section-rule residuals per reading over pairs of generators."""
    S = ModularElement(a=0, b=-1, c=1, d=0)
    T = ModularElement(a=1, b=1, c=0, d=1)
    pairs = list(pairs) or [(S, T), (T, S), (S, S), (S @ T, S)]
    summary = {}
    for reading in READINGS:
        cocycle = max(cocycle_residual(g, h, kappa, tau, v, reading) for g, h in pairs)
        rule = section_rule_residual(S, kappa, tau, v, reading)
        summary[reading] = {"cocycle": cocycle, **rule}
    return summary

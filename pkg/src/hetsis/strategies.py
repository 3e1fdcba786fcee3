"""Vaccination strategies: cost, uniform and equilibrium-based critical strategies.

A strategy ``eta`` gives, per type, the proportion left NON-vaccinated;
``eta = 1`` vaccinates no one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import maximal_equilibrium
from .model import SISModel, as_profile, integral
from .spectral import basic_reproduction_number, effective_reproduction_number


@dataclass(frozen=True, eq=False)
class StrategyEvaluation:
    eta: np.ndarray
    re: float
    cost: float


def cost(m: SISModel, eta) -> float:
    """Proportion of the population vaccinated: 1 - sum_i eta_i mu_i."""
    eta = as_profile(eta, m.n, name="eta")
    return 1.0 - integral(m, eta)


def evaluate(m: SISModel, eta) -> StrategyEvaluation:
    eta = as_profile(eta, m.n, name="eta")
    return StrategyEvaluation(eta, effective_reproduction_number(m, eta), cost(m, eta))


def uniform_critical(m: SISModel) -> np.ndarray:
    """Constant strategy 1/R0, which brings R_e to exactly 1."""
    r0 = basic_reproduction_number(m)
    if r0 < 1.0:
        raise ValueError(f"already subcritical (R0 = {r0:.6g} < 1); no vaccination is needed")
    return np.full(m.n, 1.0 / r0)


def equilibrium_strategy(m: SISModel) -> np.ndarray:
    """Vaccinate each type in proportion to its endemic prevalence: eta = 1 - g."""
    return 1.0 - maximal_equilibrium(m).g


def calibrate_to_R0(m: SISModel, target: float) -> SISModel:
    """Scale the transmission kernel so that R0 equals ``target``."""
    if not target > 0:
        raise ValueError("target R0 must be positive")
    r0 = basic_reproduction_number(m)
    if r0 == 0:
        raise ValueError("cannot calibrate a model with R0 = 0")
    return m.with_kernel(m.k * (target / r0))


# -- two groups with proportionate mixing, unit recovery rate ---------------


def _two_group_r0(a: float, b: float, mu1: float) -> float:
    return a * a * mu1 + b * b * (1.0 - mu1)


def two_group_equilibrium_strategy(a: float, b: float, mu1: float) -> tuple[np.ndarray, float]:
    """Closed form ``(1/(1+ac), 1/(1+bc))`` of the equilibrium strategy.

    ``c`` is the positive root of ``a^2 mu1/(1+ac) + b^2 mu2/(1+bc) = 1``,
    which after clearing denominators is

        ab c^2 + (a + b - ab(a mu1 + b mu2)) c + (1 - R0) = 0.

    For R0 > 1 the constant term is negative, so there is exactly one
    positive root.

    Returns:
        (eta, c)
    """
    if not (a >= b > 0):
        raise ValueError("expected a >= b > 0")
    if not 0.0 < mu1 <= 1.0:
        raise ValueError("mu1 must lie in (0, 1]")
    mu2 = 1.0 - mu1
    r0 = _two_group_r0(a, b, mu1)
    if r0 <= 1.0:
        raise ValueError(f"R0 = {r0:.6g} <= 1: the maximal equilibrium is 0")
    qa = a * b
    qb = a + b - a * b * (a * mu1 + b * mu2)
    qc = 1.0 - r0
    disc = math.sqrt(qb * qb - 4.0 * qa * qc)
    # avoid cancellation: pick the form whose numerator adds magnitudes
    if qb >= 0:
        c = -2.0 * qc / (qb + disc)
    else:
        c = (-qb + disc) / (2.0 * qa)
    return np.array([1.0 / (1.0 + a * c), 1.0 / (1.0 + b * c)]), c


def two_group_optimal_strategy(a: float, b: float, mu1: float) -> np.ndarray:
    """Cheapest critical strategy: vaccinate the more active group first."""
    if not (a > b > 0):
        raise ValueError("expected a > b > 0")
    if not 0.0 < mu1 < 1.0:
        raise ValueError("mu1 must lie in (0, 1)")
    mu2 = 1.0 - mu1
    if _two_group_r0(a, b, mu1) <= 1.0:
        raise ValueError("R0 <= 1: no vaccination is needed")
    low = b * b * mu2
    eta = np.array([(1.0 - min(1.0, low)) / (a * a * mu1), 1.0 / max(1.0, low)])
    if np.any(eta < 0) or np.any(eta > 1):
        raise ValueError(f"optimal strategy {eta} leaves [0, 1]; check a > b and R0 > 1")
    return eta

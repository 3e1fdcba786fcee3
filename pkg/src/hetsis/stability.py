"""Linearization at equilibria and the five equivalent maximality conditions.

For an equilibrium h the following are equivalent:

    (i)   h is the maximal equilibrium
    (ii)  s(DF[h]) <= 0
    (iii) R_e((1 - h)^2) <= 1
    (iv)  s(DF_{1-h}[0]) <= 0
    (v)   R_e(1 - h) <= 1

where s is the spectral bound. Each quantity is compared to its
threshold with a band of 1e-8; a value inside the band is reported as
critical, since the maximal equilibrium sits exactly on the threshold of
(iv) and (v).
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .equilibrium import RESIDUAL_TOL, maximal_equilibrium, verify_equilibrium
from .errors import HetsisError
from .model import SISModel, as_profile, sup_distance
from .spectral import effective_reproduction_number, spectral_bound, transmission_matrix

log = logging.getLogger(__name__)

BAND = 1e-8
CONDITIONS = ("maximal", "s_DF_h", "re_1mh_sq", "s_DF_vacc_0", "re_1mh")


class NotAnEquilibrium(HetsisError, ValueError):
    exit_code = 2


@dataclass(frozen=True, eq=False)
class LinearizedOperator:
    matrix: np.ndarray
    base_point: np.ndarray
    eta: np.ndarray

    @property
    def spectral_bound(self) -> float:
        return spectral_bound(self.matrix)


def linearize(m: SISModel, eta, h) -> LinearizedOperator:
    """Jacobian of F_eta at ``h``: diag(1-h) K_eta - diag(gamma + K_eta h).

    ``K_eta[i, j] = k[i, j] * eta[j] * mu[j]``; off-diagonal entries are
    non-negative for h in [0, 1]^n.
    """
    eta = np.ones(m.n) if eta is None else as_profile(eta, m.n, name="eta")
    h = as_profile(h, m.n, name="h")
    kmat = transmission_matrix(m, eta)
    a = (1.0 - h)[:, None] * kmat - np.diag(m.gamma + kmat @ h)
    return LinearizedOperator(a, h, eta)


@dataclass(frozen=True)
class MaximalityReport:
    is_maximal: bool
    distance_to_max: float
    s_DF_h: float
    re_1mh_sq: float
    s_DF_vacc_0: float
    re_1mh: float
    verdicts: tuple[bool, bool, bool, bool, bool]
    critical: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return len(set(self.verdicts)) == 1

    def to_json(self) -> str:
        d = asdict(self)
        d["conditions"] = dict(zip(CONDITIONS, self.verdicts))
        d["consistent"] = self.consistent
        return json.dumps(d, indent=2)


def _at_most(value: float, threshold: float) -> tuple[bool, bool]:
    """(value <= threshold within the band, value inside the band)."""
    return value <= threshold + BAND, abs(value - threshold) <= BAND


def check_maximality(m: SISModel, h, g_max=None) -> MaximalityReport:
    """Evaluate the five maximality conditions at the equilibrium ``h``.

    ``g_max`` may pass a precomputed maximal equilibrium.

    Raises:
        NotAnEquilibrium: sup-norm of F(h) is at least 1e-10.
    """
    h = as_profile(h, m.n, name="h")
    res = verify_equilibrium(m, None, h).residual_sup
    if res >= RESIDUAL_TOL:
        raise NotAnEquilibrium(f"h is not an equilibrium: sup |F(h)| = {res:.3g}")
    if g_max is None:
        g_max = maximal_equilibrium(m).g

    dist = sup_distance(h, g_max)
    s_h = linearize(m, None, h).spectral_bound
    re_sq = effective_reproduction_number(m, (1.0 - h) ** 2)
    s_v = linearize(m, 1.0 - h, np.zeros(m.n)).spectral_bound
    re_1 = effective_reproduction_number(m, 1.0 - h)

    checks = [
        (dist < BAND, False),
        _at_most(s_h, 0.0),
        _at_most(re_sq, 1.0),
        _at_most(s_v, 0.0),
        _at_most(re_1, 1.0),
    ]
    verdicts = tuple(bool(v) for v, _ in checks)
    critical = tuple(name for name, (_, c) in zip(CONDITIONS, checks) if c)
    report = MaximalityReport(verdicts[0], dist, s_h, re_sq, s_v, re_1, verdicts, critical)
    if not report.consistent:
        log.warning("maximality verdicts disagree: %s (critical: %s)", verdicts, critical)
    return report


def escape_direction(m: SISModel, h, support_tol: float = 0.0) -> tuple[np.ndarray, float]:
    """Perturbation along which a non-maximal equilibrium ``h`` is left.

    Takes the Perron eigenvector ``w`` of ``T_k - gamma`` restricted to the
    types where ``h`` vanishes. If the returned rate is positive then
    ``F(h + eps * w) >= 0`` for small ``eps`` and the trajectory from
    there increases.

    Returns:
        (w, rate) with ``w`` zero on the support of ``h`` and max(w) = 1.
    """
    h = as_profile(h, m.n, name="h")
    free = np.flatnonzero(h <= support_tol)
    w = np.zeros(m.n)
    if free.size == 0:
        return w, -np.inf
    kmat = transmission_matrix(m)
    sub = kmat[np.ix_(free, free)] - np.diag(m.gamma[free])
    vals, vecs = np.linalg.eig(sub)
    top = int(np.argmax(vals.real))
    v = np.abs(vecs[:, top].real)
    w[free] = v / v.max()
    return w, float(vals[top].real)

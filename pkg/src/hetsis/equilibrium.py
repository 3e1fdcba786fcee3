"""Maximal endemic equilibria and their verification.

The maximal equilibrium of the vaccinated dynamics is the greatest fixed
point of ``Phi(g) = T/(gamma + T)`` with ``T = T_{k eta}(g)``. ``Phi`` is
order preserving on [0, 1]^n and ``Phi(1) <= 1``, so iterating from the
all-ones profile decreases monotonically to it.
"""
from __future__ import annotations

import csv
import io
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _backend
from .errors import ConvergenceError
from .model import SISModel, as_profile, require_valid
from .spectral import spectral_radius, next_generation_matrix, transmission_matrix

log = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-13
MAX_ITER = 1_000_000
RESIDUAL_TOL = 1e-10
NEAR_CRITICAL_BAND = 1e-6
NEWTON_MAX_STEPS = 50
MAX_BLOCKS = 20

NEAR_CRITICAL_NOTE = "near-critical; the maximal equilibrium may be numerically indistinguishable from 0"


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    g: np.ndarray
    residual_sup: float
    iterations: int
    method: str  # "fixed_point" | "ode" | "fixed_point_plus_newton"
    re: float = float("nan")
    notes: tuple[str, ...] = field(default=())

    @property
    def near_critical(self) -> bool:
        return NEAR_CRITICAL_NOTE in self.notes


@dataclass(frozen=True, eq=False)
class ResidualReport:
    residual_sup: float
    residuals: np.ndarray


def _residual(kmat, gamma, g) -> np.ndarray:
    return (1.0 - g) * (kmat @ g) - gamma * g


def verify_equilibrium(m: SISModel, eta, g) -> ResidualReport:
    """Per-type residuals of F_eta at ``g`` and their sup-norm."""
    eta = np.ones(m.n) if eta is None else as_profile(eta, m.n, name="eta")
    g = as_profile(g, m.n, name="g")
    r = _residual(transmission_matrix(m, eta), m.gamma, g)
    return ResidualReport(float(np.max(np.abs(r), initial=0.0)), r)


def _newton_polish(kmat, gamma, g):
    """Damped Newton on F(g) = 0; the step is halved until the residual drops."""
    res = _residual(kmat, gamma, g)
    best = float(np.max(np.abs(res)))
    steps = 0
    while best >= RESIDUAL_TOL * 1e-3 and steps < NEWTON_MAX_STEPS:
        steps += 1
        t = kmat @ g
        jac = (1.0 - g)[:, None] * kmat - np.diag(gamma + t)
        try:
            delta = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(jac, -res, rcond=None)[0]
        lam = 1.0
        improved = False
        while lam > 1e-10:
            trial = np.clip(g + lam * delta, 0.0, 1.0)
            tres = _residual(kmat, gamma, trial)
            tnorm = float(np.max(np.abs(tres)))
            if tnorm < best:
                g, res, best = trial, tres, tnorm
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    return g, best, steps


def maximal_equilibrium(m: SISModel, eta=None) -> EquilibriumResult:
    """Maximal equilibrium of the dynamics vaccinated with ``eta`` (default: none).

    Monotone fixed-point iteration from the all-ones profile, stopped when
    the sup-norm change falls below 1e-13, then polished by damped Newton
    if the residual is still at least 1e-10.

    When R_e(eta) <= 1 the maximal equilibrium is exactly 0 and is returned
    without iterating.

    Raises:
        ConvergenceError: the iteration cap was hit and the residual is
            still above 1e-10; ``best`` carries the last iterate.
    """
    require_valid(m)
    n = m.n
    eta = np.ones(n) if eta is None else as_profile(eta, n, name="eta")
    re = spectral_radius(next_generation_matrix(m, eta))
    notes: list[str] = []
    if abs(re - 1.0) < NEAR_CRITICAL_BAND:
        notes.append(NEAR_CRITICAL_NOTE)
        log.warning("R_e = %.12g is within %.0e of 1: %s", re, NEAR_CRITICAL_BAND, NEAR_CRITICAL_NOTE)
    if re <= 1.0:
        return EquilibriumResult(np.zeros(n), 0.0, 0, "fixed_point", re, tuple(notes))

    kmat = transmission_matrix(m, eta)
    g, iters, status, _ = _backend.kernels.fixed_point(
        kmat, m.gamma, np.ones(n), FIXED_POINT_TOL, MAX_ITER
    )
    g = np.clip(np.asarray(g, float), 0.0, 1.0)
    residual = float(np.max(np.abs(_residual(kmat, m.gamma, g))))
    method = "fixed_point"
    if residual >= RESIDUAL_TOL:
        polished, pres, _ = _newton_polish(kmat, m.gamma, g)
        if pres < residual:
            g, residual = polished, pres
            method = "fixed_point_plus_newton"
    if residual >= RESIDUAL_TOL:
        raise ConvergenceError(
            f"maximal equilibrium not resolved after {iters} iterations "
            f"(residual {residual:.3g}, R_e = {re:.12g})",
            best=g,
        )
    if status != _backend.OK:
        notes.append(f"iteration cap reached; accepted with residual {residual:.3g}")
    return EquilibriumResult(g, residual, int(iters), method, re, tuple(notes))


def ode_equilibrium(m: SISModel, eta=None, t_end: float | None = None) -> EquilibriumResult:
    """Maximal equilibrium as the long-time limit of the dynamics from the all-ones state."""
    from .dynamics import integrate

    n = m.n
    eta = np.ones(n) if eta is None else as_profile(eta, n, name="eta")
    if t_end is None:
        t_end = 200.0 / float(m.gamma.min())
    traj = integrate(m, eta, np.ones(n), t_end, max_saved=2)
    g = traj.final
    rep = verify_equilibrium(m, eta, g)
    return EquilibriumResult(g, rep.residual_sup, len(traj.times) - 1, "ode")


def block_equilibria(m: SISModel, blocks: Sequence[Sequence[int]]) -> list[np.ndarray]:
    """All equilibria built from the maximal equilibria of isolated blocks.

    ``blocks`` must partition the types and the kernel must vanish between
    distinct blocks. The result has one profile per subset S of blocks, in
    bitmask order: entry ``mask`` is active on block ``b`` iff bit ``b`` of
    ``mask`` is set. Entry 0 is the zero profile and the last entry is the
    maximal equilibrium of the whole model.
    """
    require_valid(m)
    n = m.n
    blocks = [sorted(int(i) for i in b) for b in blocks]
    if len(blocks) > MAX_BLOCKS:
        raise ValueError(f"{len(blocks)} blocks; at most {MAX_BLOCKS} are enumerated")
    flat = sorted(itertools.chain.from_iterable(blocks))
    if flat != list(range(n)):
        raise ValueError("blocks must partition the types 0..n-1")
    owner = np.empty(n, dtype=int)
    for b, idx in enumerate(blocks):
        owner[idx] = b
    cross = owner[:, None] != owner[None, :]
    if np.any(m.k[cross] != 0):
        i, j = np.argwhere(cross & (m.k != 0))[0]
        raise ValueError(
            f"blocks are not isolated: k[{i}, {j}] = {m.k[i, j]!r} links block {owner[i]} and {owner[j]}"
        )

    per_block = []
    for idx in blocks:
        eta = np.zeros(n)
        eta[idx] = 1.0
        per_block.append(maximal_equilibrium(m, eta).g)

    out = []
    for mask in range(1 << len(blocks)):
        g = np.zeros(n)
        for b, gb in enumerate(per_block):
            if mask >> b & 1:
                g += gb
        out.append(g)
    return out


def equilibrium_table(m: SISModel, g, eta_equi=None) -> list[dict]:
    g = as_profile(g, m.n, name="g")
    eta_equi = 1.0 - g if eta_equi is None else as_profile(eta_equi, m.n, name="eta")
    return [
        {"label": lab, "mu": float(mu), "gamma": float(ga), "g": float(gi), "eta_equi": float(e)}
        for lab, mu, ga, gi, e in zip(m.labels, m.mu, m.gamma, g, eta_equi)
    ]


def equilibrium_csv(m: SISModel, g, eta_equi=None, path: str | Path | None = None) -> str:
    """Per-type CSV with columns ``label,mu,gamma,g,eta_equi``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "mu", "gamma", "g", "eta_equi"])
    for row in equilibrium_table(m, g, eta_equi):
        w.writerow([row["label"], *(repr(row[c]) for c in ("mu", "gamma", "g", "eta_equi"))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_profile_csv(path: str | Path, m: SISModel, column: str | None = None) -> np.ndarray:
    """Read a per-type profile from a CSV in the equilibrium/strategy schema.

    Rows are matched to types by ``label``. Without ``column`` the first
    of ``eta``, ``eta_equi`` present is used.
    """
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no rows")
    cols = rows[0].keys()
    if column is None:
        column = next((c for c in ("eta", "eta_equi") if c in cols), None)
        if column is None:
            raise ValueError(f"{path}: expected an 'eta' or 'eta_equi' column")
    elif column not in cols:
        raise ValueError(f"{path}: no column {column!r}")
    by_label = {r["label"]: float(r[column]) for r in rows}
    missing = [lab for lab in m.labels if lab not in by_label]
    if missing or len(by_label) != m.n:
        raise ValueError(f"{path}: labels do not match the model (missing {missing})")
    return as_profile([by_label[lab] for lab in m.labels], m.n, name=column)

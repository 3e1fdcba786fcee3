"""Model constructors: homogeneous, proportionate mixing, age and age x activity.

No contact matrix is bundled. Age-structured models take an
:class:`AgeContactData` read from a CSV file::

    ,0-5,6-12,13-19,20-39,40-59,60+
    fractions,f1,f2,f3,f4,f5,f6
    0-5,c11,c12,...
    ...

The first column of the matrix rows repeats the group label. Entry
``(i, j)`` is used directly as the kernel value k(i, j).
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import MissingDataError, ModelValidationError
from .model import DiscreteSpace, SISModel

log = logging.getLogger(__name__)

AGE_LABELS = ("0-5", "6-12", "13-19", "20-39", "40-59", "60+")
RECIPROCITY_TOL = 1e-6


@dataclass(frozen=True)
class ActivityStructure:
    """Activity levels as (contact multiplier, population fraction) pairs."""

    levels: tuple[tuple[float, float], ...] = ((0.5, 0.25), (1.0, 0.5), (2.0, 0.25))
    names: tuple[str, ...] = ("low", "average", "high")

    def __post_init__(self):
        if len(self.names) != len(self.levels):
            object.__setattr__(self, "names", tuple(f"level{i}" for i in range(len(self.levels))))
        if any(m <= 0 for m, _ in self.levels):
            raise ValueError("activity multipliers must be positive")
        if any(not 0 < f <= 1 for _, f in self.levels):
            raise ValueError("activity fractions must lie in (0, 1]")
        if abs(sum(f for _, f in self.levels) - 1.0) > 1e-12:
            raise ValueError("activity fractions must sum to 1")

    @property
    def multipliers(self) -> np.ndarray:
        return np.array([m for m, _ in self.levels])

    @property
    def fractions(self) -> np.ndarray:
        return np.array([f for _, f in self.levels])


@dataclass(frozen=True, eq=False)
class AgeContactData:
    group_labels: tuple[str, ...]
    group_fractions: np.ndarray
    contact_matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(self.group_labels)
        f = np.array(self.group_fractions, dtype=float)
        c = np.array(self.contact_matrix, dtype=float)
        n = len(labels)
        if f.shape != (n,) or c.shape != (n, n):
            raise ModelValidationError(
                [f"contact data: {n} labels, fractions {f.shape}, matrix {c.shape}"]
            )
        if abs(f.sum() - 1.0) > 1e-9:
            raise ModelValidationError([f"contact data: fractions sum to {f.sum()!r}, not 1"])
        if np.any(f <= 0):
            raise ModelValidationError(["contact data: fractions must be positive"])
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise ModelValidationError(["contact data: matrix entries must be finite and >= 0"])
        f.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "group_labels", labels)
        object.__setattr__(self, "group_fractions", f)
        object.__setattr__(self, "contact_matrix", c)

    def reciprocity_error(self) -> float:
        """Largest relative violation of mu_i c_ij = mu_j c_ji."""
        flows = self.group_fractions[:, None] * self.contact_matrix
        scale = max(float(np.abs(flows).max()), np.finfo(float).tiny)
        return float(np.abs(flows - flows.T).max()) / scale

    def symmetrized(self) -> AgeContactData:
        """Reciprocity fix: c~_ij = (mu_i c_ij + mu_j c_ji) / (2 mu_i)."""
        f = self.group_fractions
        flows = f[:, None] * self.contact_matrix
        c = (flows + flows.T) / (2.0 * f[:, None])
        return AgeContactData(self.group_labels, f, c)

    @classmethod
    def read_csv(cls, path: str | Path, n_groups: int = 6) -> AgeContactData:
        path = Path(path)
        if not path.exists():
            raise MissingDataError(f"contact data file not found: {path}")
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
        try:
            header = [c.strip() for c in rows[0]]
            labels = header[1:] if header[0] == "" or header[0].lower() in ("group", "label") else header
            if len(labels) != n_groups:
                raise ValueError(f"expected {n_groups} group labels, got {len(labels)}")
            if rows[1][0].strip().lower() != "fractions":
                raise ValueError("second row must start with 'fractions'")
            fractions = [float(x) for x in rows[1][1:]]
            body = rows[2:]
            if len(body) != n_groups:
                raise ValueError(f"expected {n_groups} matrix rows, got {len(body)}")
            matrix = []
            for r in body:
                if len(r) != n_groups + 1:
                    raise ValueError(f"matrix row {r[0]!r} has {len(r) - 1} entries")
                matrix.append([float(x) for x in r[1:]])
        except (IndexError, ValueError) as exc:
            raise ModelValidationError([f"{path}: malformed contact data ({exc})"]) from None
        return cls(tuple(labels), np.array(fractions), np.array(matrix))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["", *self.group_labels])
            w.writerow(["fractions", *(repr(float(x)) for x in self.group_fractions)])
            for lab, row in zip(self.group_labels, self.contact_matrix):
                w.writerow([lab, *(repr(float(x)) for x in row)])


def _check_positive(name: str, values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if not np.all(arr > 0):
        raise ValueError(f"{name} must be positive")
    return arr


def homogeneous(beta: float, gamma: float) -> SISModel:
    """Single-type SIS model with R0 = beta/gamma."""
    _check_positive("beta", beta)
    _check_positive("gamma", gamma)
    return SISModel(DiscreteSpace(("all",), [1.0]), [gamma], [[beta]], name="homogeneous")


def proportionate_mixing(activities, weights, gamma, labels: Sequence[str] | None = None) -> SISModel:
    """Rank-one kernel ``k_ij = a_i a_j``; ``gamma`` may be a scalar."""
    a = _check_positive("activities", activities)
    w = np.asarray(weights, dtype=float)
    if w.shape != a.shape or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be positive, one per activity, and sum to 1")
    g = _check_positive("gamma", gamma)
    g = np.broadcast_to(g, a.shape) if g.size == 1 else g
    space = DiscreteSpace.from_weights(w, labels)
    return SISModel(space, g, np.outer(a, a), name="proportionate")


def activity_structured(act: ActivityStructure | None = None, gamma: float = 1.0) -> SISModel:
    """Population structured by activity only (proportionate mixing)."""
    act = act or ActivityStructure()
    m = proportionate_mixing(act.multipliers, act.fractions, gamma, labels=act.names)
    return SISModel(m.space, m.gamma, m.k, name="activity")


def _contact_kernel(data: AgeContactData, reciprocity_fix: bool) -> AgeContactData:
    err = data.reciprocity_error()
    if err > RECIPROCITY_TOL:
        if reciprocity_fix:
            log.info("contact matrix violates reciprocity by %.3g; symmetrizing", err)
            return data.symmetrized()
        log.warning("contact matrix violates reciprocity by %.3g (use the reciprocity fix to symmetrize)", err)
    return data


def age_structured(data: AgeContactData, gamma: float = 1.0, *, reciprocity_fix: bool = False) -> SISModel:
    _check_positive("gamma", gamma)
    data = _contact_kernel(data, reciprocity_fix)
    n = len(data.group_labels)
    space = DiscreteSpace.from_weights(data.group_fractions, data.group_labels)
    return SISModel(space, np.full(n, float(gamma)), data.contact_matrix, name="age")


def age_activity(
    data: AgeContactData,
    act: ActivityStructure | None = None,
    gamma: float = 1.0,
    *,
    reciprocity_fix: bool = False,
) -> SISModel:
    """Age x activity model, types ordered age-major: index = age * L + level.

    ``k[(i,l), (j,l')] = m_l * m_l' * c_ij`` and ``mu[(i,l)] = f_i * p_l``.
    """
    act = act or ActivityStructure()
    _check_positive("gamma", gamma)
    data = _contact_kernel(data, reciprocity_fix)
    mult, frac = act.multipliers, act.fractions
    k = np.kron(data.contact_matrix, np.outer(mult, mult))
    mu = np.kron(data.group_fractions, frac)
    labels = [f"{a}/{l}" for a in data.group_labels for l in act.names]
    space = DiscreteSpace.from_weights(mu, labels)
    return SISModel(space, np.full(len(labels), float(gamma)), k, name="age_activity")


def isolated_blocks(models: Sequence[SISModel], weights: Sequence[float]) -> tuple[SISModel, list[list[int]]]:
    """Block-diagonal model from sub-models that never infect each other.

    Block ``b`` gets total mass ``weights[b]``; its kernel is rescaled by
    ``1/weights[b]`` so that, in isolation, it keeps the sub-model's R0.
    Returns the model and the block partition.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(models),) or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("one positive weight per block, summing to 1")
    n = sum(m.n for m in models)
    k = np.zeros((n, n))
    mu = np.empty(n)
    gamma = np.empty(n)
    labels, blocks = [], []
    start = 0
    for b, (m, wb) in enumerate(zip(models, w)):
        idx = list(range(start, start + m.n))
        k[start:start + m.n, start:start + m.n] = m.k / wb
        mu[idx] = m.mu * wb
        gamma[idx] = m.gamma
        labels += [f"b{b}:{lab}" for lab in m.labels]
        blocks.append(idx)
        start += m.n
    return SISModel(DiscreteSpace.from_weights(mu, labels), gamma, k, name="blocks"), blocks


def example_models() -> dict[str, SISModel]:
    """Built-in models that need no external data."""
    from .strategies import calibrate_to_R0

    out = {}
    for r0 in (2.0, 2.5, 3.0):
        out[f"homogeneous_R{r0:g}"] = homogeneous(r0, 1.0)
    out["homogeneous_subcritical"] = homogeneous(0.5, 1.0)
    out["two_group_a2_b1"] = proportionate_mixing([2.0, 1.0], [0.5, 0.5], 1.0)
    for r0 in (2.0, 2.5, 3.0):
        out[f"activity_R{r0:g}"] = calibrate_to_R0(activity_structured(), r0)
    blocks, _ = isolated_blocks([homogeneous(2.0, 1.0), proportionate_mixing([2.0, 1.0], [0.5, 0.5], 1.0)], [0.4, 0.6])
    out["isolated_blocks"] = blocks
    return out

"""Finite type spaces, SIS model parameters and profiles.

A type space is a finite set of labelled types carrying probability
weights ``mu``. A model adds per-type recovery rates ``gamma`` and a
transmission kernel ``k`` where ``k[i, j]`` is the rate at which type ``j``
infects type ``i`` (infectee row, infector column).

Profiles (infection states, equilibria, vaccination strategies) are plain
1-d float arrays with values in [0, 1].
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, ModelValidationError

WEIGHT_SUM_TOL = 1e-12
NORMALIZE_WARN_TOL = 1e-9
PROFILE_TOL = 1e-12


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    """Finite type space with probability weights.

    Weights are stored as given; use :meth:`from_weights` to normalize
    survey-style weights that do not sum exactly to one.
    """

    labels: tuple[str, ...]
    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "mu", _frozen(self.mu, 1))
        if len(self.labels) != self.mu.shape[0]:
            raise DimensionError(
                f"{len(self.labels)} labels for {self.mu.shape[0]} weights"
            )

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @classmethod
    def from_weights(cls, weights: Sequence[float], labels: Sequence[str] | None = None) -> DiscreteSpace:
        """Build a space, dividing the weights by their sum.

        Weights already summing to one within 1e-12 are kept bit-for-bit.
        A warning is emitted when the correction exceeds 1e-9.
        """
        w = np.asarray(weights, dtype=float)
        if labels is None:
            labels = [str(i) for i in range(w.shape[0])]
        total = float(w.sum())
        if total > 0 and abs(total - 1.0) > WEIGHT_SUM_TOL:
            if abs(total - 1.0) > NORMALIZE_WARN_TOL:
                warnings.warn(f"type weights sum to {total!r}; normalizing", stacklevel=2)
            w = w / total
        return cls(tuple(labels), w)

    @classmethod
    def uniform(cls, n: int) -> DiscreteSpace:
        return cls(tuple(str(i) for i in range(n)), np.full(n, 1.0 / n))


@dataclass(frozen=True, eq=False)
class SISModel:
    """Heterogeneous SIS model on a finite type space."""

    space: DiscreteSpace
    gamma: np.ndarray
    k: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frozen(self.gamma, 1))
        object.__setattr__(self, "k", _frozen(self.k, 2))
        n = self.space.n
        if self.gamma.shape != (n,):
            raise DimensionError(f"gamma has shape {self.gamma.shape}, expected ({n},)")
        if self.k.shape != (n, n):
            raise DimensionError(f"k has shape {self.k.shape}, expected ({n}, {n})")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def mu(self) -> np.ndarray:
        return self.space.mu

    @property
    def labels(self) -> tuple[str, ...]:
        return self.space.labels

    @property
    def next_generation_kernel(self) -> np.ndarray:
        """Kernel k(x, y) / gamma(y); note the division acts on the infector column."""
        return self.k / self.gamma[None, :]

    def with_kernel(self, k: np.ndarray) -> SISModel:
        return SISModel(self.space, self.gamma, k, name=self.name)

    # -- I/O -------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "mu": self.mu.tolist(),
            "gamma": self.gamma.tolist(),
            "k": self.k.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SISModel:
        try:
            mu = d["mu"]
            gamma = d["gamma"]
            k = d["k"]
        except KeyError as exc:
            raise ModelValidationError([f"model file is missing field {exc.args[0]!r}"]) from None
        labels = d.get("labels") or [str(i) for i in range(len(mu))]
        try:
            space = DiscreteSpace.from_weights(mu, labels)
            return cls(space, gamma, k)
        except (DimensionError, ValueError) as exc:
            raise ModelValidationError([str(exc)]) from None

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load_json(cls, path: str | Path) -> SISModel:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Violation:
    field: str
    index: tuple[int, ...] | None
    magnitude: float
    message: str

    def __str__(self) -> str:
        where = "" if self.index is None else f" at {self.index}"
        return f"{self.message}{where} (value {self.magnitude:.6g})"


def validate_model(m: SISModel) -> list[Violation]:
    """Return every invariant violation of ``m``; an empty list means valid."""
    out: list[Violation] = []
    mu = m.mu
    for i in np.flatnonzero(~(mu > 0)):
        out.append(Violation("mu", (int(i),), float(mu[i]), "weights must be positive"))
    total = float(mu.sum())
    if not abs(total - 1.0) <= WEIGHT_SUM_TOL:
        out.append(Violation("mu", None, total, "weights must sum to 1"))
    for i in np.flatnonzero(~(m.gamma > 0) | ~np.isfinite(m.gamma)):
        out.append(Violation("gamma", (int(i),), float(m.gamma[i]), "gamma must be positive"))
    for i, j in zip(*np.nonzero(~(m.k >= 0) | ~np.isfinite(m.k))):
        out.append(Violation("k", (int(i), int(j)), float(m.k[i, j]), "k must be non-negative"))
    return out


def require_valid(m: SISModel) -> None:
    problems = validate_model(m)
    if problems:
        raise ModelValidationError([str(p) for p in problems])


# -- profiles -------------------------------------------------------------


def as_profile(values, n: int | None = None, *, name: str = "profile") -> np.ndarray:
    """Validate ``values`` as an element of [0, 1]^n and return a float copy.

    Values outside [0, 1] by at most 1e-12 are clamped; larger excursions
    raise ``ValueError``.
    """
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim == 0:
        if n is None:
            raise DimensionError(f"{name}: scalar needs an explicit size")
        arr = np.full(n, float(arr))
    if arr.ndim != 1:
        raise DimensionError(f"{name}: expected 1-d values, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name}: length {arr.shape[0]} does not match {n} types")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: non-finite values")
    lo, hi = float(arr.min(initial=0.0)), float(arr.max(initial=0.0))
    if lo < -PROFILE_TOL or hi > 1.0 + PROFILE_TOL:
        raise ValueError(f"{name}: values must lie in [0, 1], got range [{lo}, {hi}]")
    return np.clip(arr, 0.0, 1.0)


def ones(n: int) -> np.ndarray:
    return np.ones(n)


def zeros(n: int) -> np.ndarray:
    return np.zeros(n)


def _check_same(f: np.ndarray, g: np.ndarray) -> None:
    if f.shape != g.shape:
        raise DimensionError(f"profile shapes differ: {f.shape} vs {g.shape}")


def add(f, g) -> np.ndarray:
    f, g = np.asarray(f, float), np.asarray(g, float)
    _check_same(f, g)
    return f + g


def subtract(f, g) -> np.ndarray:
    f, g = np.asarray(f, float), np.asarray(g, float)
    _check_same(f, g)
    return f - g


def multiply(f, g) -> np.ndarray:
    f, g = np.asarray(f, float), np.asarray(g, float)
    _check_same(f, g)
    return f * g


def clamp(f) -> np.ndarray:
    return np.clip(np.asarray(f, float), 0.0, 1.0)


def sup_distance(f, g) -> float:
    f, g = np.asarray(f, float), np.asarray(g, float)
    _check_same(f, g)
    return float(np.max(np.abs(f - g), initial=0.0))


def integral(space: DiscreteSpace | SISModel, f) -> float:
    """Integral of ``f`` against the type weights, i.e. sum_i f_i mu_i."""
    mu = space.mu
    f = np.asarray(f, float)
    if f.shape != mu.shape:
        raise DimensionError(f"profile of shape {f.shape} on a space of {mu.shape[0]} types")
    return math.fsum(f * mu)

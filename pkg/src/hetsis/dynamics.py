"""SIS vector fields and forward integration in [0, 1]^n."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .errors import ConvergenceError
from .model import SISModel, as_profile, require_valid
from .spectral import transmission_matrix

CLAMP_TOL = 1e-10
MAX_HALVINGS = 20
MAX_SAVED = 10_000


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Saved states of an integration; ``states[i]`` is the profile at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray
    labels: tuple[str, ...]
    max_clamp: float = 0.0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.labels])
        for t, row in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(x)) for x in row)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def vector_field(m: SISModel, g) -> np.ndarray:
    """F(g) = (1 - g) * T_k(g) - gamma * g."""
    g = as_profile(g, m.n, name="g")
    return (1.0 - g) * (transmission_matrix(m) @ g) - m.gamma * g


def vaccinated_vector_field(m: SISModel, eta, g) -> np.ndarray:
    """F_eta(g) = (1 - g) * T_{k eta}(g) - gamma * g."""
    g = as_profile(g, m.n, name="g")
    return (1.0 - g) * (transmission_matrix(m, eta) @ g) - m.gamma * g


def default_dt(m: SISModel, eta=None) -> float:
    kmat = transmission_matrix(m, eta)
    scale = max(float(m.gamma.max()), float(kmat.sum(axis=1).max()))
    return 0.01 / scale


def default_t_end(m: SISModel) -> float:
    return 50.0 / float(m.gamma.min())


def integrate(
    m: SISModel,
    eta,
    u0,
    t_end: float,
    dt: float | None = None,
    *,
    max_saved: int = MAX_SAVED,
) -> Trajectory:
    """Integrate du/dt = F_eta(u) from ``u0`` over [0, t_end] with fixed-step RK4.

    ``dt`` defaults to ``0.01 / max(max gamma, max row sum of k*eta*mu)`` and is
    shrunk slightly so that a whole number of steps lands on ``t_end``.
    After every step the state is clamped to [0, 1]; if the clamp would
    move it by more than 1e-10 the step is redone with half the step size,
    up to 20 times. At most ``max_saved`` states are stored, always
    including the first and the last.

    Raises:
        ConvergenceError: the clamp rule still fails after 20 halvings.
    """
    require_valid(m)
    n = m.n
    eta = np.ones(n) if eta is None else as_profile(eta, n, name="eta")
    u0 = as_profile(u0, n, name="u0")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if dt is None:
        dt = default_dt(m, eta)
    if not dt > 0:
        raise ValueError("dt must be positive")
    if max_saved < 2:
        raise ValueError("max_saved must be at least 2")

    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    step = t_end / n_steps
    stride = max(1, math.ceil(n_steps / (max_saved - 1)))

    kmat = transmission_matrix(m, eta)
    times, states, status, max_clamp = _backend.kernels.rk4(
        kmat, m.gamma, u0, step, n_steps, stride, CLAMP_TOL, MAX_HALVINGS
    )
    if status == _backend.UNDERFLOW:
        t_fail = float(times[-1]) if len(times) else 0.0
        raise ConvergenceError(
            f"step size underflow after {MAX_HALVINGS} halvings near t={t_fail:.6g} "
            f"(excursion {max_clamp:.3g} outside [0, 1])",
            best=np.asarray(states[-1]),
        )
    times = np.asarray(times)
    times[-1] = t_end
    return Trajectory(times, np.asarray(states), m.labels, float(max_clamp))

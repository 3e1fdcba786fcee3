"""Pure-Python/numpy kernels. Reference implementation for ``_kernels.pyx``.

Every function here has a compiled twin with the same signature and
return convention; ``_backend`` picks one at import.

``kmat`` is always the effective transmission matrix with entries
``k[i, j] * eta[j] * mu[j]`` so that ``kmat @ g`` is the infection
pressure on each type.
"""
from __future__ import annotations

import math

import numpy as np

# status codes shared with the compiled kernels
OK = 0
MAX_ITER = 1
UNDERFLOW = 2


def fixed_point(kmat, gamma, g0, tol, max_iter):
    """Iterate g <- T/(gamma + T), T = kmat @ g, from ``g0``.

    Returns ``(g, iterations, status, last_change)``. Stops when the
    sup-norm change drops below ``tol``.
    """
    kmat = np.ascontiguousarray(kmat, dtype=float)
    gamma = np.ascontiguousarray(gamma, dtype=float)
    g = np.array(g0, dtype=float)
    change = math.inf
    for it in range(1, max_iter + 1):
        t = kmat @ g
        new = t / (gamma + t)
        change = float(np.max(np.abs(new - g), initial=0.0))
        g = new
        if change < tol:
            return g, it, OK, change
    return g, max_iter, MAX_ITER, change


def _field(kmat, gamma, u):
    return (1.0 - u) * (kmat @ u) - gamma * u


def _rk4_step(kmat, gamma, u, h):
    k1 = _field(kmat, gamma, u)
    k2 = _field(kmat, gamma, u + 0.5 * h * k1)
    k3 = _field(kmat, gamma, u + 0.5 * h * k2)
    k4 = _field(kmat, gamma, u + h * k3)
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _excursion(u):
    return max(float(np.max(u - 1.0, initial=0.0)), float(np.max(-u, initial=0.0)))


def rk4(kmat, gamma, u0, dt, n_steps, save_stride, clamp_tol, max_halvings):
    """Fixed-step RK4 on F(u) = (1 - u) * (kmat @ u) - gamma * u.

    A step whose result leaves [0, 1] by more than ``clamp_tol`` is redone
    as 2, 4, ... sub-steps, up to ``max_halvings`` halvings; the result is
    then clamped. States are saved at step 0, every ``save_stride`` steps,
    and at the final step.

    Returns ``(times, states, status, max_clamp)``; on underflow the
    arrays hold what was saved so far.
    """
    kmat = np.ascontiguousarray(kmat, dtype=float)
    gamma = np.ascontiguousarray(gamma, dtype=float)
    u = np.array(u0, dtype=float)
    n_saved = n_steps // save_stride + 1 + (1 if n_steps % save_stride else 0)
    times = np.empty(n_saved)
    states = np.empty((n_saved, u.shape[0]))
    times[0] = 0.0
    states[0] = u
    saved = 1
    max_clamp = 0.0
    for step in range(1, n_steps + 1):
        halvings = 0
        while True:
            sub = 1 << halvings
            h = dt / sub
            v = u
            for _ in range(sub):
                v = _rk4_step(kmat, gamma, v, h)
            exc = _excursion(v)
            if exc <= clamp_tol:
                break
            halvings += 1
            if halvings > max_halvings:
                return times[:saved], states[:saved], UNDERFLOW, exc
        max_clamp = max(max_clamp, exc)
        u = np.clip(v, 0.0, 1.0)
        if step % save_stride == 0 or step == n_steps:
            times[saved] = step * dt
            states[saved] = u
            saved += 1
    return times[:saved], states[:saved], OK, max_clamp


def power_iteration(a, shift, tol, max_iter):
    """Perron value of a non-negative matrix by shifted power iteration.

    Iterates x <- normalize(a @ x + shift * x) from the all-ones vector and
    tracks the Rayleigh quotient of ``a``. Stops when its relative change
    is below ``tol``. Returns ``(value, iterations, status)``.
    """
    a = np.ascontiguousarray(a, dtype=float)
    n = a.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n))
    lam = math.nan
    for it in range(1, max_iter + 1):
        y = a @ x
        new = float(x @ y)
        if not np.any(y):
            return 0.0, it, OK
        if it > 1 and abs(new - lam) <= tol * abs(new):
            return new, it, OK
        lam = new
        z = y + shift * x
        x = z / np.linalg.norm(z)
    return lam, max_iter, MAX_ITER

"""Next-generation matrices, spectral radii and spectral bounds."""
from __future__ import annotations

import numpy as np

from . import _backend
from .errors import ConvergenceError, DimensionError
from .model import SISModel, as_profile, require_valid

POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000
# shift as a fraction of the largest row sum; breaks the oscillation of
# periodic (e.g. bipartite) matrices without slowing primitive ones much
POWER_SHIFT = 0.25


def apply_operator(kernel, g, mu) -> np.ndarray:
    """Integral operator: ``out_i = sum_j kernel[i, j] * g[j] * mu[j]``."""
    kernel = np.asarray(kernel, float)
    g = np.asarray(g, float)
    mu = np.asarray(mu, float)
    n = mu.shape[0]
    if kernel.shape != (n, n) or g.shape != (n,):
        raise DimensionError(
            f"kernel {kernel.shape}, profile {g.shape} and weights {mu.shape} do not match"
        )
    return kernel @ (g * mu)


def next_generation_matrix(m: SISModel, eta=None) -> np.ndarray:
    """Matrix with entries ``k[i, j] * eta[j] * mu[j] / gamma[j]``.

    ``eta=None`` means no vaccination (the all-ones strategy).
    """
    w = m.mu / m.gamma
    if eta is not None:
        w = w * as_profile(eta, m.n, name="eta")
    return m.k * w[None, :]


def transmission_matrix(m: SISModel, eta=None) -> np.ndarray:
    """Matrix with entries ``k[i, j] * eta[j] * mu[j]``; its product with g is T_{k eta}(g)."""
    w = m.mu if eta is None else m.mu * as_profile(eta, m.n, name="eta")
    return m.k * w[None, :]


def _square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def spectral_radius(matrix, method: str = "dense") -> float:
    """Spectral radius of a non-negative square matrix.

    ``method="dense"`` takes the largest eigenvalue modulus from a full
    eigensolve and is the authoritative route. ``method="power"`` runs
    shifted power iteration from the all-ones vector; on reducible
    matrices it returns the spectral radius of the part reachable from
    that start vector.
    """
    a = _square(matrix)
    if a.size == 0:
        return 0.0
    if np.any(a < 0):
        raise ValueError("spectral_radius expects a non-negative matrix")
    if method == "dense":
        return float(np.max(np.abs(np.linalg.eigvals(a))))
    if method == "power":
        if not np.any(a):
            return 0.0
        shift = POWER_SHIFT * float(a.sum(axis=1).max())
        value, iters, status = _backend.kernels.power_iteration(a, shift, POWER_TOL, POWER_MAX_ITER)
        if status != _backend.OK:
            raise ConvergenceError(
                f"power iteration did not converge in {iters} iterations; "
                "use method='dense'",
                best=value,
            )
        return float(value)
    raise ValueError(f"unknown method {method!r}; expected 'dense' or 'power'")


def spectral_bound(matrix) -> float:
    """Largest real part over the eigenvalues of ``matrix``."""
    a = _square(matrix)
    if a.size == 0:
        return -np.inf
    return float(np.max(np.linalg.eigvals(a).real))


def basic_reproduction_number(m: SISModel, method: str = "dense") -> float:
    require_valid(m)
    return spectral_radius(next_generation_matrix(m), method)


def effective_reproduction_number(m: SISModel, eta, method: str = "dense") -> float:
    """R_e(eta): spectral radius of the next-generation matrix restricted by ``eta``."""
    require_valid(m)
    return spectral_radius(next_generation_matrix(m, eta), method)


def diag_scale(f) -> np.ndarray:
    """Multiplication operator by ``f`` as a diagonal matrix."""
    return np.diag(np.asarray(f, float))

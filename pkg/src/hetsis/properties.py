"""Randomized property checks across modules, driven by a single seed.

``run_property_suite(seed)`` returns a plain-text report with one
PASS/FAIL line per property. The report contains no timings, so equal
seeds give byte-identical output.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .builders import example_models, isolated_blocks, proportionate_mixing
from .dynamics import integrate, vector_field
from .equilibrium import block_equilibria, maximal_equilibrium, ode_equilibrium
from .model import DiscreteSpace, SISModel
from .spectral import (
    basic_reproduction_number,
    diag_scale,
    effective_reproduction_number,
    spectral_radius,
)
from .stability import check_maximality
from .strategies import calibrate_to_R0, two_group_equilibrium_strategy


# -- random instances -----------------------------------------------------


def random_nonneg(rng: np.random.Generator, n: int, density: float | None = None) -> np.ndarray:
    if density is None:
        density = rng.uniform(0.3, 1.0)
    a = rng.random((n, n)) * (rng.random((n, n)) < density)
    return a


def random_model(rng: np.random.Generator, n: int | None = None) -> SISModel:
    """Random model with n <= 20 types, gamma in [0.5, 2] and an arbitrary kernel scale."""
    if n is None:
        n = int(rng.integers(1, 21))
    mu = rng.dirichlet(np.ones(n))
    gamma = rng.uniform(0.5, 2.0, n)
    k = random_nonneg(rng, n) * rng.uniform(0.5, 6.0)
    space = DiscreteSpace(tuple(str(i) for i in range(n)), mu / mu.sum())
    return SISModel(space, gamma, k, name="random")


def random_supercritical_model(rng: np.random.Generator, min_r0: float = 1.05, n: int | None = None) -> SISModel:
    """Rejection-sample :func:`random_model` until R0 > ``min_r0``."""
    while True:
        m = random_model(rng, n)
        if basic_reproduction_number(m) > min_r0:
            return m


def random_block_model(rng: np.random.Generator, r0_range=(1.2, 4.0)) -> tuple[SISModel, list[list[int]]]:
    """Two isolated blocks, each supercritical on its own."""
    subs = []
    for _ in range(2):
        sub = random_model(rng, int(rng.integers(1, 8)))
        while basic_reproduction_number(sub) == 0:
            sub = random_model(rng, sub.n)
        subs.append(calibrate_to_R0(sub, rng.uniform(*r0_range)))
    w = rng.uniform(0.2, 0.8)
    return isolated_blocks(subs, [w, 1.0 - w])


# -- checks ---------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    count: int
    worst: float
    tolerance: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name} n={self.count} worst={self.worst:.3e} tol={self.tolerance:.0e}"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def check_rho_monotone(rng, count=200, inject_fault=False) -> CheckResult:
    worst = -np.inf
    for _ in range(count):
        n = int(rng.integers(1, 21))
        a = random_nonneg(rng, n)
        b = a + random_nonneg(rng, n) * rng.uniform(0, 1)
        ra, rb = spectral_radius(a), spectral_radius(b)
        excess = (rb - ra) if inject_fault else (ra - rb)
        worst = max(worst, excess / max(rb, 1e-300))
    return CheckResult("rho_monotone", worst <= 1e-9, count, worst, 1e-9)


def check_rho_commutes(rng, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 21))
        t, s = random_nonneg(rng, n), random_nonneg(rng, n)
        worst = max(worst, _rel(spectral_radius(t @ s), spectral_radius(s @ t)))
    return CheckResult("rho_TS_equals_rho_ST", worst <= 1e-9, count, worst, 1e-9)


def check_rho_homogeneous(rng, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 21))
        a = random_nonneg(rng, n)
        lam = rng.uniform(0, 10)
        worst = max(worst, _rel(spectral_radius(lam * a), lam * spectral_radius(a)))
    return CheckResult("rho_homogeneity", worst <= 1e-9, count, worst, 1e-9)


def check_sandwich(rng, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 21))
        t = random_nonneg(rng, n)
        f = 1.0 - rng.random(n)
        lhs = spectral_radius(diag_scale(f) @ t @ diag_scale(f))
        rhs = spectral_radius(t @ diag_scale(f * f))
        worst = max(worst, _rel(lhs, rhs))
    return CheckResult("sandwich_identity", worst <= 1e-9, count, worst, 1e-9)


def check_power_vs_dense(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 21))
        a = random_nonneg(rng, n, density=1.0) + 1e-3
        worst = max(worst, _rel(spectral_radius(a, "power"), spectral_radius(a, "dense")))
    return CheckResult("power_matches_dense", worst <= 1e-9, count, worst, 1e-9)


def check_re_monotone(rng, count=100) -> CheckResult:
    worst = -np.inf
    for _ in range(count):
        m = random_model(rng)
        hi = rng.random(m.n)
        lo = hi * rng.random(m.n)
        r_lo, r_hi = effective_reproduction_number(m, lo), effective_reproduction_number(m, hi)
        worst = max(worst, (r_lo - r_hi) / max(r_hi, 1e-300))
    return CheckResult("re_monotone_in_eta", worst <= 1e-9, count, worst, 1e-9)


def check_re_scaling(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        m = random_model(rng)
        eta = rng.random(m.n)
        lam = rng.random()
        worst = max(worst, _rel(effective_reproduction_number(m, lam * eta), lam * effective_reproduction_number(m, eta)))
    return CheckResult("re_scaling", worst <= 1e-9, count, worst, 1e-9)


def draw_two_group(rng) -> tuple[float, float, float]:
    """Random (a, b, mu1) with a >= b > 0 and R0 > 1."""
    while True:
        a, b = sorted(rng.uniform(0.1, 4.0, 2), reverse=True)
        mu1 = rng.uniform(0.02, 0.98)
        if a * a * mu1 + b * b * (1 - mu1) > 1.02:
            return float(a), float(b), float(mu1)


def check_two_group(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        a, b, mu1 = draw_two_group(rng)
        eta, _ = two_group_equilibrium_strategy(a, b, mu1)
        m = proportionate_mixing([a, b], [mu1, 1 - mu1], 1.0)
        worst = max(worst, float(np.max(np.abs(eta - (1.0 - maximal_equilibrium(m).g)))))
    return CheckResult("two_group_closed_form", worst <= 1e-8, count, worst, 1e-8)


def check_criticality(rng, count=50) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        m = random_supercritical_model(rng)
        g = maximal_equilibrium(m).g
        worst = max(worst, abs(effective_reproduction_number(m, 1.0 - g) - 1.0))
    return CheckResult("endemic_strategy_is_critical", worst <= 1e-7, count, worst, 1e-7)


def check_route_agreement(models: dict[str, SISModel] | None = None) -> CheckResult:
    models = models if models is not None else example_models()
    worst = 0.0
    for m in models.values():
        fp = maximal_equilibrium(m).g
        ode = ode_equilibrium(m).g
        worst = max(worst, float(np.max(np.abs(fp - ode))))
    return CheckResult("fixed_point_matches_ode", worst <= 1e-6, len(models), worst, 1e-6)


def check_maximality_equivalence(rng, count=20) -> CheckResult:
    bad = 0
    margin = np.inf
    for _ in range(count):
        m, blocks = random_block_model(rng)
        eqs = block_equilibria(m, blocks)
        g = eqs[-1]
        for mask, h in enumerate(eqs):
            rep = check_maximality(m, h, g_max=g)
            if not rep.consistent or rep.is_maximal != (mask == len(eqs) - 1):
                bad += 1
            if mask != len(eqs) - 1:
                margin = min(margin, rep.s_DF_h, rep.re_1mh - 1.0)
    return CheckResult("maximality_equivalence", bad == 0 and margin > 1e-6, count, float(bad), 0)


ROUNDING_SLACK = 1e-12


def check_monotone_dynamics(rng, count=10) -> CheckResult:
    """Trajectories from a scaled-down equilibrium increase and stay below the maximum.

    Step-to-step decreases up to 1e-12 are treated as rounding.
    """
    worst = 0.0
    ok = True
    for _ in range(count):
        m = random_supercritical_model(rng, n=int(rng.integers(1, 11)))
        g = maximal_equilibrium(m).g
        u0 = rng.uniform(0.05, 0.95) * g
        if np.min(vector_field(m, u0)) < -ROUNDING_SLACK:
            return CheckResult("monotone_dynamics", False, count, np.inf, 1e-8)
        traj = integrate(m, None, u0, 50.0 / m.gamma.min())
        drop = float(max(0.0, -np.min(np.diff(traj.states, axis=0))))
        over = float(max(0.0, np.max(traj.final - g)))
        ok = ok and drop <= ROUNDING_SLACK and over <= 1e-8
        worst = max(worst, drop, over)
    return CheckResult("monotone_dynamics", ok, count, worst, 1e-8)


def run_property_suite(seed: int = 0, *, inject_fault: bool = False) -> tuple[str, bool]:
    """Run every property check; returns (report text, all passed)."""
    rng = np.random.default_rng(seed)
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_rho_monotone(rng, inject_fault=inject_fault),
        lambda: check_rho_commutes(rng),
        lambda: check_rho_homogeneous(rng),
        lambda: check_sandwich(rng),
        lambda: check_power_vs_dense(rng),
        lambda: check_re_monotone(rng),
        lambda: check_re_scaling(rng),
        lambda: check_two_group(rng),
        lambda: check_criticality(rng),
        lambda: check_maximality_equivalence(rng),
        lambda: check_monotone_dynamics(rng),
        lambda: check_route_agreement(),
    ]
    results = [c() for c in checks]
    ok = all(r.passed for r in results)
    lines = [f"property suite seed={seed}"]
    lines += [r.line() for r in results]
    lines.append(f"{'ALL PASS' if ok else 'FAILURES'} {sum(r.passed for r in results)}/{len(results)}")
    return "\n".join(lines) + "\n", ok

import json

import numpy as np
import pytest

from hetsis import (
    block_equilibria,
    calibrate_to_R0,
    check_maximality,
    effective_reproduction_number,
    escape_direction,
    integrate,
    linearize,
    maximal_equilibrium,
    vector_field,
    verify_equilibrium,
)
from hetsis.properties import random_block_model, random_model, random_supercritical_model
from hetsis.stability import CONDITIONS, NotAnEquilibrium


def test_linearize_examples(hom2, activity2):
    np.testing.assert_allclose(linearize(hom2, None, [0.0]).matrix, [[1.0]])
    # 0.5*2 - 1 - 2*0.5: the infection-pressure term is k*h*mu = 1
    np.testing.assert_allclose(linearize(hom2, None, [0.5]).matrix, [[-1.0]], atol=1e-15)
    np.testing.assert_array_equal(linearize(activity2, np.zeros(3), np.full(3, 0.3)).matrix, np.diag(-activity2.gamma))


def test_linearize_matches_finite_differences(rng):
    m = random_model(rng, 5)
    eta, h = rng.random(5), rng.random(5)
    jac = linearize(m, eta, h).matrix
    eps = 1e-6
    from hetsis import vaccinated_vector_field

    for j in range(5):
        e = np.zeros(5)
        e[j] = eps
        fd = (vaccinated_vector_field(m, eta, np.clip(h + e, 0, 1)) - vaccinated_vector_field(m, eta, np.clip(h - e, 0, 1))) / (2 * eps)
        np.testing.assert_allclose(jac[:, j], fd, atol=1e-6)


def test_linearization_is_metzler(rng):
    for _ in range(20):
        m = random_model(rng)
        a = linearize(m, rng.random(m.n), rng.random(m.n)).matrix
        off = a - np.diag(np.diag(a))
        assert np.all(off >= 0)


def test_maximal_equilibrium_passes_all(activity2, two_group):
    for m in (activity2, two_group):
        rep = check_maximality(m, maximal_equilibrium(m).g)
        assert rep.is_maximal and all(rep.verdicts) and rep.consistent
        assert rep.re_1mh == pytest.approx(1.0, abs=1e-8)
        assert "re_1mh" in rep.critical


def test_zero_fails_all_when_supercritical(activity2):
    rep = check_maximality(activity2, np.zeros(3))
    assert not any(rep.verdicts)
    assert rep.s_DF_h > 0 and rep.re_1mh > 1


def test_single_block_equilibrium_fails_all(two_blocks):
    m, blocks = two_blocks
    eqs = block_equilibria(m, blocks)
    for h in eqs[1:-1]:
        rep = check_maximality(m, h)
        assert not any(rep.verdicts)
        assert rep.s_DF_h > 1e-6 and rep.re_1mh > 1 + 1e-6
    assert all(check_maximality(m, eqs[-1]).verdicts)


def test_random_blocks_are_consistent(rng):
    for _ in range(10):
        m, blocks = random_block_model(rng)
        eqs = block_equilibria(m, blocks)
        for mask, h in enumerate(eqs):
            rep = check_maximality(m, h, g_max=eqs[-1])
            assert rep.consistent
            assert rep.is_maximal == (mask == len(eqs) - 1)


def test_rejects_non_equilibrium(hom2):
    with pytest.raises(NotAnEquilibrium, match="residual|sup"):
        check_maximality(hom2, [0.3])


def test_report_json(hom2):
    d = json.loads(check_maximality(hom2, [0.5]).to_json())
    assert set(d["conditions"]) == set(CONDITIONS)
    assert d["consistent"] is True
    assert d["re_1mh"] == pytest.approx(1.0)


def test_sandwich_scan(rng):
    """s(DF[h]) and R_e((1-h)^2) - 1 share their sign as the kernel is scaled."""
    base = random_supercritical_model(rng, n=4)
    for theta in np.linspace(0.5, 1.5, 21):
        m = base.with_kernel(base.k * theta)
        h = np.zeros(4)
        s = linearize(m, None, h).spectral_bound
        re = effective_reproduction_number(m, (1 - h) ** 2)
        if abs(s) > 1e-8 and abs(re - 1) > 1e-8:
            assert (s > 0) == (re > 1)


def test_sandwich_scan_through_criticality(activity2):
    # around R0 = 1 the zero equilibrium changes from maximal to non-maximal
    for theta in np.linspace(0.5, 1.5, 21) / 2.0:
        m = activity2.with_kernel(activity2.k * theta)
        s = linearize(m, None, np.zeros(3)).spectral_bound
        re = effective_reproduction_number(m, np.ones(3))
        if abs(re - 1) > 1e-8:
            assert (s > 0) == (re > 1)


def test_re_ordering(rng):
    for _ in range(30):
        m = random_model(rng)
        h = rng.random(m.n)
        assert effective_reproduction_number(m, 1 - h) >= effective_reproduction_number(m, (1 - h) ** 2) * (1 - 1e-12)


def test_escape_direction(two_blocks):
    m, blocks = two_blocks
    h = block_equilibria(m, blocks)[1]  # first block infected, second clean
    w, rate = escape_direction(m, h)
    assert rate > 0
    assert w[0] == 0.0 and w[1] == 1.0
    eps = 1e-3
    u0 = h + eps * w
    slack = verify_equilibrium(m, None, h).residual_sup
    assert np.all(vector_field(m, u0) >= -slack - 1e-15)
    traj = integrate(m, None, u0, 30.0)
    assert np.min(np.diff(traj.states, axis=0)) >= -1e-12
    np.testing.assert_allclose(traj.final, maximal_equilibrium(m).g, atol=1e-6)


def test_escape_direction_random_blocks(rng):
    for _ in range(5):
        m, blocks = random_block_model(rng)
        eqs = block_equilibria(m, blocks)
        h = eqs[1]
        w, rate = escape_direction(m, h)
        assert rate > 0
        f = vector_field(m, h + 1e-6 * w)
        slack = verify_equilibrium(m, None, h).residual_sup
        assert np.all(f >= -slack - 1e-15)
        assert np.all(f[w > 0] > 0)


def test_escape_direction_for_maximal_has_no_room(hom2):
    w, rate = escape_direction(hom2, [0.5])
    assert rate == -np.inf and not w.any()

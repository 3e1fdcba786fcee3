import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hetsis import (
    activity_structured,
    apply_operator,
    basic_reproduction_number,
    calibrate_to_R0,
    effective_reproduction_number,
    homogeneous,
    linearize,
    maximal_equilibrium,
    next_generation_matrix,
    spectral_bound,
    spectral_radius,
)
from hetsis import spectral
from hetsis.errors import ConvergenceError, DimensionError
from hetsis.spectral import diag_scale


def test_apply_zero_kernel():
    np.testing.assert_array_equal(apply_operator(np.zeros((3, 3)), [0.2, 0.5, 1.0], [0.2, 0.3, 0.5]), 0.0)


def test_apply_one_type():
    np.testing.assert_array_equal(apply_operator([[1.7]], [1.0], [1.0]), [1.7])


def test_apply_two_group_by_hand():
    out = apply_operator([[4.0, 2.0], [2.0, 1.0]], [1.0, 1.0], [0.5, 0.5])
    np.testing.assert_allclose(out, [3.0, 1.5], rtol=0, atol=1e-15)


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_operator(np.eye(2), [1.0, 1.0, 1.0], [0.5, 0.5])


@pytest.mark.parametrize("method", ["dense", "power"])
def test_spectral_radius_trivial(method):
    assert spectral_radius(np.zeros((4, 4)), method) == 0.0
    assert spectral_radius([[2.0]], method) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("method", ["dense", "power"])
def test_two_group_next_gen_radius(two_group, method):
    # rank-one kernel: radius is a^2 mu1 + b^2 mu2 = 4*0.5 + 1*0.5
    assert spectral_radius(next_generation_matrix(two_group), method) == pytest.approx(2.5, rel=1e-12)


def test_power_handles_periodic_matrix():
    a = np.array([[0.0, 3.0], [1.0 / 3.0, 0.0]])
    assert spectral_radius(a, "power") == pytest.approx(1.0, rel=1e-10)


def test_power_reports_non_convergence(monkeypatch):
    monkeypatch.setattr(spectral, "POWER_MAX_ITER", 2)
    a = np.array([[1.0, 0.9], [0.3, 0.2]])
    with pytest.raises(ConvergenceError, match="dense"):
        spectral_radius(a, "power")


def test_negative_matrix_rejected():
    with pytest.raises(ValueError):
        spectral_radius([[-1.0]])


def test_unknown_method():
    with pytest.raises(ValueError):
        spectral_radius(np.eye(2), "krylov")


def test_r0_homogeneous():
    assert basic_reproduction_number(homogeneous(2.0, 1.0)) == pytest.approx(2.0, rel=1e-15)


def test_r0_scales_with_kernel(rng):
    from hetsis.properties import random_model

    m = random_model(rng, 7)
    theta = 3.7
    assert basic_reproduction_number(m.with_kernel(3.7 * m.k)) == pytest.approx(theta * basic_reproduction_number(m), rel=1e-12)


def test_r0_calibrated_activity():
    assert basic_reproduction_number(calibrate_to_R0(activity_structured(), 2.0)) == pytest.approx(2.0, rel=1e-12)


def test_re_trivial_strategies(activity2):
    r0 = basic_reproduction_number(activity2)
    assert effective_reproduction_number(activity2, np.ones(3)) == pytest.approx(r0, rel=1e-15)
    assert effective_reproduction_number(activity2, np.zeros(3)) == 0.0
    assert effective_reproduction_number(activity2, np.full(3, 1 / r0)) == pytest.approx(1.0, rel=1e-12)


def test_spectral_bound_examples(hom2):
    assert spectral_bound(np.diag([-1.0, -2.0])) == -1.0
    assert spectral_bound([[2.0 - 1.0]]) == 1.0
    g = maximal_equilibrium(hom2).g
    assert spectral_bound(linearize(hom2, None, g).matrix) <= 0


def test_spectral_bound_at_maximal_equilibrium_is_nonpositive(activity2, two_group):
    for m in (activity2, two_group):
        g = maximal_equilibrium(m).g
        assert linearize(m, None, g).spectral_bound <= 0


# -- properties -------------------------------------------------------------

nonneg = st.integers(1, 12).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(0, 10, allow_subnormal=False))
)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@settings(max_examples=150, deadline=None)
@given(nonneg, st.data())
def test_rho_monotone(a, data):
    bump = data.draw(arrays(np.float64, a.shape, elements=st.floats(0, 5, allow_subnormal=False)))
    assert spectral_radius(a) <= spectral_radius(a + bump) * (1 + 1e-9) + 1e-12


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_rho_commutation(n, seed):
    r = np.random.default_rng(seed)
    t, s = r.random((n, n)), r.random((n, n)) * (r.random((n, n)) < 0.6)
    assert _rel(spectral_radius(t @ s), spectral_radius(s @ t)) <= 1e-9


@settings(max_examples=150, deadline=None)
@given(nonneg, st.floats(0, 100))
def test_rho_homogeneous(a, lam):
    ra = spectral_radius(a)
    assert spectral_radius(lam * a) == pytest.approx(lam * ra, rel=1e-9, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_sandwich_identity(n, seed):
    r = np.random.default_rng(seed)
    t = r.random((n, n))
    f = r.random(n)
    lhs = spectral_radius(diag_scale(f) @ t @ diag_scale(f))
    rhs = spectral_radius(t @ diag_scale(f**2))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_power_agrees_with_dense(n, seed):
    r = np.random.default_rng(seed)
    a = r.random((n, n)) + 0.01
    assert _rel(spectral_radius(a, "power"), spectral_radius(a, "dense")) <= 1e-9

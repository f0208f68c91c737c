import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj.convex import (SENTINEL, convex_envelope, exact_step, growth_exponent, hopf_iterate,
                            hopf_solve, is_convex, lax_oleinik_solve, legendre, legendre_brute)
from roughhj.errors import ArgumentError, PreconditionError
from roughhj.grid import GridFn
from roughhj.hamiltonians import abs_h, power, quadratic


def brute_envelope(x, v):
    """Largest convex minorant by checking every chord (O(n^3) oracle)."""
    out = v.copy()
    n = x.size
    for i in range(n):
        for j in range(i + 1, n):
            lam = (x[i:j + 1] - x[i]) / (x[j] - x[i])
            chord = (1 - lam) * v[i] + lam * v[j]
            out[i:j + 1] = np.minimum(out[i:j + 1], chord)
    return out


# -- legendre ------------------------------------------------------------------


def test_legendre_quadratic_self_conjugate():
    h = 0.01
    f = GridFn.sample(lambda p: 0.5 * p ** 2, -4, 4, h)
    q = np.linspace(-3, 3, 301)
    assert np.abs(legendre(f, q).values - 0.5 * q ** 2).max() <= h


def test_legendre_abs():
    f = GridFn.sample(np.abs, -2, 2, 0.01)
    q = np.linspace(-3, 3, 601)
    fs = legendre(f, q).values
    inside = np.abs(q) <= 1
    assert np.abs(fs[inside]).max() <= 1e-12
    # outside [-1, 1] the finite grid caps the supremum at |p| = 2
    np.testing.assert_allclose(fs[~inside], 2 * (np.abs(q[~inside]) - 1), atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_biconjugate_of_random_convex_piecewise_linear(seed):
    rng = np.random.default_rng(seed)
    n = 60
    slopes = np.sort(rng.uniform(-3, 3, n - 1))
    h = 2.0 / (n - 1)
    f = GridFn(np.concatenate([[0.0], np.cumsum(slopes * h)]), -1.0, h)
    q = np.linspace(slopes[0], slopes[-1], 400)
    fs = legendre(f, q)
    np.testing.assert_allclose(fs.values, legendre_brute(f, q), atol=1e-12)
    fss = legendre(fs, f.x)
    assert np.abs(fss.values - f.values).max() <= 3 * h


def test_legendre_rejects_empty_slope_range():
    with pytest.raises(ArgumentError):
        legendre(GridFn(np.zeros(5), 0.0, 0.1))


vals = st.lists(st.floats(-5, 5, allow_nan=False), min_size=4, max_size=40)


@given(vals)
@settings(max_examples=150, deadline=None)
def test_conjugate_invariants(v):
    v = np.array(v)
    n = v.size
    f = GridFn(v, -1.0, 2.0 / (n - 1))
    q = np.linspace(-20, 20, 201)
    fs = legendre(f, q)
    np.testing.assert_allclose(fs.values, legendre_brute(f, q), atol=1e-9)
    d2 = fs.values[2:] - 2 * fs.values[1:-1] + fs.values[:-2]
    assert d2.min() >= -1e-9
    env = convex_envelope(f)
    assert np.all(env.values <= v + 1e-12)
    g = f.with_values(v + np.abs(v).max() * 0.1 + 0.5)
    assert np.all(legendre(g, q).values <= fs.values + 1e-12)


# -- convex envelope -------------------------------------------------------------


def test_envelope_fixes_convex():
    f = GridFn.sample(lambda p: p ** 2 + p, -1, 1, 0.05)
    np.testing.assert_allclose(convex_envelope(f).values, f.values, atol=1e-12)


def test_envelope_double_well():
    f = GridFn.sample(lambda p: np.minimum(np.abs(p - 1), np.abs(p + 1)), -3, 3, 0.05)
    env = convex_envelope(f).values
    x = f.x
    inside = np.abs(x) <= 1 + 1e-12
    assert np.abs(env[inside]).max() <= 1e-12
    np.testing.assert_allclose(env[~inside], np.abs(x[~inside]) - 1, atol=1e-12)
    np.testing.assert_allclose(env, brute_envelope(x, f.values), atol=1e-12)


def test_envelope_translation():
    rng = np.random.default_rng(0)
    f = GridFn(rng.normal(size=30), 0.0, 0.1)
    a = convex_envelope(f).values + 2.5
    b = convex_envelope(f.with_values(f.values + 2.5)).values
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_envelope_skips_sentinel():
    v = np.full(11, SENTINEL)
    v[3:8] = [1.0, 0.0, 2.0, 0.5, 1.0]
    env = convex_envelope(GridFn(v, 0.0, 1.0)).values
    assert np.all(env[:3] == SENTINEL) and np.all(env[8:] == SENTINEL)
    np.testing.assert_allclose(env[3:8], brute_envelope(np.arange(5.0), v[3:8]))


# -- hopf and lax-oleinik ---------------------------------------------------


def test_hopf_time_zero():
    u0 = GridFn.sample(lambda x: x ** 2, -1, 1, 0.02)
    assert np.abs(hopf_solve(quadratic(), u0, 0.0).values - u0.values).max() <= 0.02 ** 2


def test_hopf_abs_cone():
    u0 = GridFn.sample(np.abs, -2, 2, 0.01)
    for t in (0.3, 1.0):
        u = hopf_solve(abs_h(), u0, t)
        np.testing.assert_allclose(u.values, np.abs(u0.x) + t, atol=1e-12)


def test_hopf_linear_data():
    p0, a, t = 0.7, 0.3, 0.4
    u0 = GridFn.sample(lambda x: p0 * x + a, -1, 1, 0.05)
    u = hopf_solve(quadratic(), u0, t)
    np.testing.assert_allclose(u.values, p0 * u0.x + a + t * 0.5 * p0 ** 2, atol=1e-12)


def test_hopf_rejects_nonconvex():
    with pytest.raises(PreconditionError):
        hopf_solve(abs_h(), GridFn.sample(np.sin, -3, 3, 0.1), 0.5)


def test_lax_oleinik_quadratic_closed_form():
    h = 0.01
    u0 = GridFn.sample(lambda x: 0.5 * x ** 2, -2, 2, h)
    t = 0.7
    u = lax_oleinik_solve(quadratic(), u0, t)
    x = u0.x
    inside = np.abs(x) <= 1
    assert np.abs(u.values - x ** 2 / (2 * (1 + t)))[inside].max() <= h


def test_lax_oleinik_abs_is_sliding_min():
    rng = np.random.default_rng(1)
    h = 0.05
    u0 = GridFn(rng.uniform(0, 1, 81), -2.0, h)
    t = 0.25
    u = lax_oleinik_solve(abs_h(), u0, t)
    r = int(round(t / h))
    ext = u0.extended(r)
    oracle = np.array([ext[i:i + 2 * r + 1].min() for i in range(u0.n)])
    np.testing.assert_allclose(u.values, oracle, atol=1e-12)


def test_lax_oleinik_constant_data():
    u0 = GridFn(np.full(21, 1.5), 0.0, 0.1)
    for H in (quadratic(), abs_h()):
        u = lax_oleinik_solve(H, u0, 0.8)
        np.testing.assert_allclose(u.values, 1.5 - 0.8 * float(H(0.0)), atol=1e-12)


def test_lax_oleinik_errors():
    u0 = GridFn(np.zeros(5), 0.0, 0.1)
    with pytest.raises(ArgumentError):
        lax_oleinik_solve(abs_h(), u0, 0.0)
    with pytest.raises(PreconditionError):
        lax_oleinik_solve(power(0.25), u0, 0.5)


def test_hopf_semigroup_and_agreement_with_lax_oleinik():
    h = 0.01
    u0 = GridFn.sample(lambda x: np.abs(x) + 0.5 * x ** 2, -3, 3, h)
    H = quadratic()
    s, t = 0.2, 0.3
    two = hopf_solve(H, hopf_solve(H, u0, s), t)
    one = hopf_solve(H, u0, s + t)
    inside = np.abs(u0.x) <= 1.5
    assert np.abs(two.values - one.values)[inside].max() <= 2 * h
    lo = lax_oleinik_solve(-H, u0, s + t)
    assert np.abs(lo.values - one.values)[inside].max() <= 2 * h


def test_exact_step_sign_convention():
    u0 = GridFn.sample(np.abs, -2, 2, 0.05)
    up = exact_step(abs_h(), u0, 0.5)
    down = exact_step(abs_h(), u0, -0.5)
    x = u0.x
    inside = np.abs(x) <= 1
    np.testing.assert_allclose(up.values[inside], np.abs(x[inside]) + 0.5, atol=1e-12)
    np.testing.assert_allclose(down.values[inside], np.maximum(np.abs(x[inside]) - 0.5, 0.0),
                               atol=1e-12)


# -- hopf iteration ----------------------------------------------------------


def test_hopf_iterate_bounded_for_abs():
    traj, blew_up = hopf_iterate(abs_h(), 0.5, 60, n=801)
    assert not blew_up
    ms = [m for _, m in traj]
    assert max(ms) <= 1.0


def test_hopf_iterate_zero_increment_is_fixed():
    traj, blew_up = hopf_iterate(power(0.25), 0.0, 10, n=201)
    w0 = traj[0][0].values
    assert not blew_up
    for w, _ in traj:
        np.testing.assert_array_equal(w.values, w0)


def test_hopf_iterate_power_quarter_grows():
    traj, blew_up = hopf_iterate(power(0.25), 1.0, 120, n=2001)
    ms = [m for _, m in traj]
    assert blew_up
    assert 0.6 <= growth_exponent(ms) <= 0.9


def test_is_convex_tolerance():
    f = GridFn.sample(lambda p: p ** 2, -1, 1, 0.1)
    assert is_convex(f)
    assert not is_convex(f.with_values(-f.values))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj.convex import exact_step
from roughhj.errors import ArgumentError, PreconditionError
from roughhj.grid import GridFn
from roughhj.hamiltonians import abs_h, power, quadratic, table
from roughhj.paths import Path, linear_path, reduce_path, zigzag_path
from roughhj.semigroup import (PathwiseSolveSpec, cancellation_check, composition_identity_check,
                               finite_speed_check, lipschitz_decay_check, longtime_experiment,
                               oracle_abs, path_stability_check, reduced_equivalence_check,
                               sandwich_bounds, solve, solve_exact)

H_ABS = abs_h()
H_QUAD = quadratic()


def random_lipschitz(rng, n=201, h=0.02, L=1.0, boundary="linear"):
    slopes = rng.uniform(-L, L, n - 1)
    return GridFn(np.concatenate([[0.0], np.cumsum(slopes * h)]), -h * (n // 2), h, boundary)


def cone(h=0.01, R=3.0):
    return GridFn.sample(np.abs, -R, R, h)


# -- solve_exact ---------------------------------------------------------------


def test_zero_path_is_identity():
    u0 = random_lipschitz(np.random.default_rng(0))
    zero = Path([0.0, 1.0], [0.0, 0.0])
    np.testing.assert_array_equal(solve_exact(H_QUAD, zero, u0).values, u0.values)


def test_matches_oracle_abs():
    h = 0.01
    u0 = cone(h)
    path = zigzag_path([0.3, 0.55, 0.8, 1.0], [0.3, 0.05, 0.3, 0.1])
    u = solve_exact(H_ABS, path, u0)
    assert np.abs(u.values - oracle_abs(path, u0.x, 1.0)).max() <= h


def test_constant_data_rides_the_path():
    p = np.linspace(-5, 5, 1001)
    H = table(p, 0.5 * p ** 2 + 0.5, name="shifted quadratic")
    u0 = GridFn(np.full(41, 2.0), 0.0, 0.05)
    path = zigzag_path([0.4, 1.0], [0.7, -0.2])
    u = solve_exact(H, path, u0)
    np.testing.assert_allclose(u.values, 2.0 + 0.5 * (-0.2), atol=1e-12)


def test_nonconvex_routes_to_scheme():
    u0 = cone(0.05)
    with pytest.raises(PreconditionError):
        solve_exact(power(0.25), linear_path(1.0), u0)
    u = solve(PathwiseSolveSpec([H_ABS], linear_path(1.0, 0.5), u0, method="scheme"))
    inside = np.abs(u0.x) <= 2
    assert np.abs(u.values - (np.abs(u0.x) + 0.5))[inside].max() <= 0.1


# -- oracle_abs ----------------------------------------------------------------


def test_oracle_abs_examples():
    zero = Path([0.0, 1.0], [0.0, 0.0])
    x = np.linspace(-1, 1, 5)
    np.testing.assert_array_equal(oracle_abs(zero, x, 1.0), np.abs(x))
    assert oracle_abs(linear_path(1.0), 0.0, 1.0) == 1.0
    down_up = zigzag_path([0.5, 1.0], [-1.0, 0.0])
    assert oracle_abs(down_up, 0.5, 1.0) == 0.5
    u = solve_exact(H_ABS, down_up, cone(0.01))
    assert abs(u(0.5) - 0.5) <= 0.01


# -- cancellation and composition ---------------------------------------------------


def test_cancellation_zero():
    assert cancellation_check(H_ABS, cone(), 0.0) == (0.0, 0.0)


def test_cancellation_cone_restored():
    h = 0.01
    lhs, rhs = cancellation_check(H_ABS, cone(h), 1.0)
    assert lhs <= h and rhs >= -h


def test_cancellation_quadratic_bump():
    h = 0.01
    u0 = GridFn.sample(lambda x: np.exp(-4 * x ** 2), -3, 3, h)
    lhs, rhs = cancellation_check(H_QUAD, u0, 0.5)
    assert lhs <= 3 * h and rhs >= -3 * h


def test_composition_identity_examples():
    h = 0.01
    u0 = GridFn.sample(lambda x: np.abs(x) + 0.3 * np.sin(3 * x), -3, 3, h)
    assert composition_identity_check(H_QUAD, u0, 0.4, 0.0, 0.3) <= 2 * h
    assert composition_identity_check(H_QUAD, u0, 0.4, 0.4, 0.4) <= 2 * h
    rng = np.random.default_rng(3)
    w0 = random_lipschitz(rng, n=601, h=h)
    assert composition_identity_check(H_ABS, w0, 1.0, 0.5, 0.7) <= 3 * h * 1.0
    with pytest.raises(ArgumentError):
        composition_identity_check(H_ABS, w0, 0.3, 0.5, 0.7)


# -- finite speed, stability, reduction --------------------------------------------


def plateau(h=0.01, R=2.0, A=1.0, box=5.0):
    return GridFn.sample(lambda x: A + np.maximum(np.abs(x) - R, 0.0), -box, box, h)


def test_finite_speed_examples():
    h = 0.01
    zero = Path([0.0, 1.0], [0.0, 0.0])
    rep = finite_speed_check(H_ABS, plateau(h), zero, 1.0, 1.0, 2.0)
    assert rep["measured"] >= 2.0 - h
    zig = zigzag_path([0.5, 1.0], [0.6, -0.4])
    rep = finite_speed_check(H_ABS, plateau(h), zig, 1.0, 1.0, 2.0)
    assert rep["measured"] >= 1.0 - 2 * h and not rep["vacuous"]
    big = zigzag_path([0.5, 1.0], [1.5, -1.0])
    assert finite_speed_check(H_ABS, plateau(h), big, 1.0, 1.0, 2.0)["vacuous"]


def test_path_stability_examples():
    rng = np.random.default_rng(5)
    u0 = random_lipschitz(rng, n=401, h=0.01)
    path = zigzag_path([0.5, 1.0], [0.5, 0.1])
    same = path_stability_check([H_QUAD], u0, u0, path, path, 1.0)
    assert same["measured"] == 0.0 and same["bound"] == 0.0
    delta = 0.05
    other = Path(path.times, path.values[:, 0] + delta * path.times)
    rep = path_stability_check([H_QUAD], u0, u0, path, other, 1.0)
    assert rep["measured"] <= rep["C"] * delta + 1e-12
    shifted = u0.with_values(u0.values + 0.25)
    rep = path_stability_check([H_QUAD], u0, shifted, path, path, 1.0)
    assert rep["measured"] == pytest.approx(0.25, abs=1e-12)


def test_reduced_equivalence_examples():
    h = 0.01
    rng = np.random.default_rng(6)
    u0 = random_lipschitz(rng, n=601, h=h)
    red = zigzag_path([0.3, 0.6, 1.0], [0.8, -0.2, 0.5])
    assert reduced_equivalence_check(H_ABS, u0, red) == 0.0
    updownup = zigzag_path([0.2, 0.3, 0.5, 0.6, 1.0], [0.4, 0.3, 0.7, 0.1, 0.5])
    assert reduce_path(updownup) != updownup
    assert reduced_equivalence_check(H_ABS, u0, updownup) <= 3 * h
    mono = Path([0, 0.3, 0.7, 1.0], [0, 0.2, 0.5, 0.6])
    assert reduced_equivalence_check(H_QUAD, u0, mono) <= 2 * h * u0.lipschitz()


# -- Lipschitz decay and long time -------------------------------------------------


def sawtooth_data(h, slope=10.0, period=0.5):
    def f(x):
        s = np.mod(x, period)
        return slope * np.minimum(s, period - s)
    return GridFn.sample(f, 0.0, 1.0, h, boundary="periodic")


def test_lipschitz_decay_sawtooth():
    u0 = sawtooth_data(2.0 ** -9)
    path = zigzag_path([1.0, 2.0], [1.0, -1.0])
    rep = lipschitz_decay_check(H_QUAD, u0, path, [0.0, 1.0, 2.0])
    assert rep[0]["skipped"]
    for r in rep[1:]:
        assert r["measured"] <= r["bound"] * 1.1


def test_lipschitz_decay_slope_one_monotone():
    u0 = sawtooth_data(2.0 ** -9)
    times = [0.1, 0.2, 0.4, 0.8]
    rep = lipschitz_decay_check(H_QUAD, u0, linear_path(1.0), times)
    measured = [r["measured"] for r in rep]
    assert all(b <= a + 1e-9 for a, b in zip(measured, measured[1:]))
    assert all(r["measured"] <= r["bound"] * 1.1 for r in rep)


def test_lipschitz_decay_needs_uniform_convexity():
    with pytest.raises(PreconditionError):
        lipschitz_decay_check(H_ABS, sawtooth_data(0.01), linear_path(1.0), [0.5])


def test_longtime_examples():
    h = 1 / 256
    up = longtime_experiment(linear_path(1.0, 2.0), h)
    assert np.abs(up["final"].values - 1.0).max() <= 5 * h
    down = longtime_experiment(linear_path(-1.0, 2.0), h)
    assert np.abs(down["final"].values).max() <= 5 * h
    t = np.linspace(0, 2, 41)
    wiggle = Path(t, t + 0.2 * np.sin(7 * t) * (t > 0) * np.minimum(1, t))
    near = longtime_experiment(wiggle, h)
    assert near["final"].values.min() >= 0.75 - 5 * h
    for run in (up, down, near):
        traj = run["trajectory"]
        assert all(b[1] <= a[1] + 1e-12 for a, b in zip(traj, traj[1:]))
        assert all(b[2] >= a[2] - 1e-12 for a, b in zip(traj, traj[1:]))


# -- properties -------------------------------------------------------------------

# total variation at most 3, so a box of half-width 4 keeps |x| <= 1 free of edge effects
zig = st.lists(st.floats(-0.6, 0.6, allow_nan=False), min_size=1, max_size=3)


def _zig(vals):
    t = np.linspace(0, 1, len(vals) + 1)[1:]
    return zigzag_path(t, vals)


@given(zig, st.integers(0, 2 ** 16), st.floats(0, 0.5))
@settings(max_examples=40, deadline=None)
def test_contraction_order_and_lipschitz(vals, seed, bump):
    rng = np.random.default_rng(seed)
    h = 0.02
    u = random_lipschitz(rng, n=401, h=h)
    v = u.with_values(u.values + bump * np.exp(-u.x ** 2))
    path = _zig(vals)
    inside = np.abs(u.x) <= 1.0
    for H in (H_ABS, H_QUAD):
        Su, Sv = solve_exact(H, path, u), solve_exact(H, path, v)
        gap = (Sv.values - Su.values)[inside]
        assert np.all(gap >= -1e-12)
        # the grid Legendre step resamples between slope and space grids: contractive up to O(h)
        assert gap.max() <= np.abs(v.values - u.values).max() + h
        assert np.abs(np.diff(Su.values[inside])).max() / h <= u.lipschitz() + 1e-9


@given(zig, st.floats(0.05, 0.5), st.integers(0, 2 ** 16))
@settings(max_examples=30, deadline=None)
def test_monotone_in_the_path(vals, lift, seed):
    rng = np.random.default_rng(seed)
    h = 0.02
    u0 = random_lipschitz(rng, n=401, h=h)
    inside = np.abs(u0.x) <= 1.0
    lower = _zig(vals)
    # an upper path with the same endpoint: lift interior knots only
    upper_vals = lower.values[:, 0].copy()
    upper_vals[1:-1] += lift
    upper = Path(lower.times, upper_vals)
    for H in (H_ABS, H_QUAD):
        a = solve_exact(H, lower, u0)
        b = solve_exact(H, upper, u0)
        assert np.all((a.values <= b.values + 2 * h)[inside])


@given(zig, st.integers(0, 2 ** 16))
@settings(max_examples=30, deadline=None)
def test_sandwich(vals, seed):
    rng = np.random.default_rng(seed)
    h = 0.02
    u0 = random_lipschitz(rng, n=401, h=h)
    path = _zig(vals)
    lo, hi = sandwich_bounds([H_ABS], u0, path, 1.0)
    u = solve_exact(H_ABS, path, u0)
    inside = np.abs(u0.x) <= 1.0
    assert np.all((lo.values <= u.values + 2 * h)[inside])
    assert np.all((u.values <= hi.values + 2 * h)[inside])


@pytest.mark.parametrize("tau", [1e-320, -1e-320])
def test_subnormal_time_step_is_identity(tau):
    u = cone(h=0.1, R=1.0)
    with np.errstate(all="raise"):
        for H in (H_ABS, H_QUAD):
            np.testing.assert_array_equal(exact_step(H, u, tau).values, u.values)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj.errors import ArgumentError, CFLError
from roughhj.paths import Path, linear_path, zigzag_path
from roughhj.scl import (ConservedField, burgers, contraction_suite, cubic, defect_estimate,
                         entropy_step, flux_from_catalog, kinetic_density,
                         kinetic_transport_check, l1_distance, linear_flux, pathwise_scl_solve,
                         reject_semilinear_noise, table_flux)


def step_data(left, right, n, a=-1.0, b=1.0):
    return ConservedField.sample(lambda x: np.where(x < 0, left, right), a, b, n,
                                 periodic=False)


def l1_error(u, exact):
    return float(np.abs(u.values - exact(u.x)).sum() * u.h)


# -- Riemann problems ------------------------------------------------------------------


def test_burgers_shock_speed():
    errs = []
    for n in (200, 400):
        u = pathwise_scl_solve(burgers(), linear_path(1.0, 0.5), step_data(1.0, 0.0, n))
        errs.append(l1_error(u, lambda x: np.where(x < 0.25, 1.0, 0.0)))
    assert errs[1] <= 0.01 and errs[1] < errs[0]


def test_burgers_rarefaction_fan():
    t = 0.5
    u = pathwise_scl_solve(burgers(), linear_path(1.0, t), step_data(0.0, 1.0, 400))
    assert l1_error(u, lambda x: np.clip(x / t, 0.0, 1.0)) <= 0.02


def test_negative_increment_reverses_orientation():
    # u_t - (u^2/2)_x = 0 with 0 | 1 data is a shock moving left at speed 1/2
    u = pathwise_scl_solve(burgers(), linear_path(-1.0, 0.5), step_data(0.0, 1.0, 400))
    assert l1_error(u, lambda x: np.where(x < -0.25, 0.0, 1.0)) <= 0.01


def test_linear_advection_follows_the_path_endpoint():
    c = 0.5
    path = zigzag_path([0.3, 0.7, 1.0], [0.4, -0.1, 0.2])
    f = lambda x: np.sin(2 * np.pi * x)  # noqa: E731
    errs = []
    for n in (100, 200, 400):
        u0 = ConservedField.sample(f, 0.0, 1.0, n)
        u = pathwise_scl_solve(linear_flux(c), path, u0)
        shift = c * path(1.0)
        exact = ConservedField.sample(lambda x: f(x - shift), 0.0, 1.0, n)
        errs.append(l1_distance(u, exact))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 0.05


def test_zero_increment_keeps_state():
    u0 = ConservedField.sample(np.sin, 0.0, 2 * np.pi, 32)
    u = pathwise_scl_solve(burgers(), Path([0.0, 1.0], [0.0, 0.0]), u0)
    np.testing.assert_array_equal(u.values, u0.values)
    assert u.t == 1.0


# -- invariants -----------------------------------------------------------------------

coeffs = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3)
zig = st.lists(st.floats(-0.5, 0.5, allow_nan=False), min_size=1, max_size=4)


@given(coeffs, zig, st.sampled_from(["burgers", "cubic"]))
@settings(max_examples=40, deadline=None)
def test_conservation_maximum_principle_tv(c, vals, key):
    n = 64
    f = lambda x: c[0] + c[1] * np.sin(2 * np.pi * x) + c[2] * np.cos(4 * np.pi * x)  # noqa
    u0 = ConservedField.sample(f, 0.0, 1.0, n)
    t = np.linspace(0, 1, len(vals) + 1)[1:]
    u = pathwise_scl_solve(flux_from_catalog(key), zigzag_path(t, vals), u0)
    scale = max(1.0, np.abs(u0.values).max())
    assert abs(u.mass - u0.mass) <= 64 * np.finfo(float).eps * n * scale
    assert u.values.max() <= u0.values.max() + 1e-12
    assert u.values.min() >= u0.values.min() - 1e-12
    assert u.total_variation <= u0.total_variation + 1e-12


def test_entropy_step_refusals():
    u = ConservedField.sample(np.sin, 0.0, 2 * np.pi, 32)
    with pytest.raises(CFLError):
        entropy_step(burgers(), u, 2 * u.h)
    with pytest.raises(ArgumentError):
        entropy_step(burgers(), u, 0.0)
    with pytest.raises(ArgumentError):
        entropy_step(burgers(), u, 0.1 * u.h, orientation=0)


def test_field_validation():
    with pytest.raises(ArgumentError):
        ConservedField(np.zeros(2), 0.0, 0.1)
    with pytest.raises(ArgumentError):
        ConservedField(np.array([0.0, np.nan, 1.0]), 0.0, 0.1)
    u = ConservedField(np.array([1.0, -1.0, 2.0]), 0.0, 0.5)
    assert u.mass == 1.0 and u.norm(np.inf) == 2.0 and u.total_variation == 6.0


# -- fluxes ---------------------------------------------------------------------------


def test_flux_splitting_sums_to_flux():
    u = np.linspace(-2, 2, 41)
    for A in (burgers(), cubic(), linear_flux(-0.7)):
        np.testing.assert_allclose(A.plus(u) + A.minus(u), A(u), atol=1e-12)


def test_table_flux():
    u = np.linspace(-2, 2, 401)
    T = table_flux(u, 0.5 * u ** 2)
    q = np.linspace(-1.5, 1.5, 13)
    np.testing.assert_allclose(T(q), 0.5 * q ** 2, atol=1e-4)
    np.testing.assert_allclose(T.plus(q) + T.minus(q), T(q), atol=1e-12)
    assert T.convex
    with pytest.raises(ArgumentError):
        T(3.0)
    with pytest.raises(ArgumentError):
        table_flux([1.0, 2.0], [0.0, 1.0])
    with pytest.raises(ArgumentError):
        flux_from_catalog("quartic")


def test_semilinear_noise_rejected():
    with pytest.raises(ArgumentError, match="shock"):
        reject_semilinear_noise(lambda u: u)


# -- kinetic diagnostics -----------------------------------------------------------------


def test_kinetic_density_examples():
    u = ConservedField(np.array([0.5, -0.5, 0.0]), 0.0, 1.0)
    xi = np.linspace(-1, 1, 9)
    k = kinetic_density(u, xi)
    np.testing.assert_array_equal(k.chi[0], (xi >= 0) & (xi <= 0.5))
    np.testing.assert_array_equal(k.chi[1], -((xi >= -0.5) & (xi < 0)).astype(int))
    # closed interval 0 <= xi <= u: a zero state marks only the node xi = 0
    np.testing.assert_array_equal(k.chi[2], xi == 0)
    with pytest.raises(ArgumentError):
        kinetic_density(u, np.linspace(0, 1, 5))


def test_kinetic_density_integrates_to_u():
    u = ConservedField.sample(np.sin, 0.0, 2 * np.pi, 50)
    xi = np.linspace(-1, 1, 20001)
    assert np.abs(kinetic_density(u, xi).integrate() - u.values).max() <= 2e-4


def test_defect_vanishes_without_motion_and_is_small_for_transport():
    u0 = ConservedField.sample(lambda x: np.sin(2 * np.pi * x), 0.0, 1.0, 128)
    assert defect_estimate(u0, u0).total == 0.0
    totals = []
    for n in (128, 256, 512):
        u0 = ConservedField.sample(lambda x: np.sin(2 * np.pi * x), 0.0, 1.0, n)
        u = pathwise_scl_solve(linear_flux(1.0), linear_path(1.0, 0.25), u0)
        totals.append(defect_estimate(u0, u).total)
    assert all(t >= 0 for t in totals)
    # numerical dissipation of a smooth transported profile shrinks like h
    assert totals[2] <= 0.6 * totals[1] <= 0.36 * totals[0]


def test_kinetic_transport_check_burgers():
    u0 = ConservedField.sample(lambda x: np.sin(2 * np.pi * x), 0.0, 1.0, 128)
    traj = pathwise_scl_solve(burgers(), zigzag_path([0.15, 0.3], [0.15, 0.05]), u0,
                              record=True)
    rep = kinetic_transport_check(burgers(), traj, stride=4)
    assert rep["abs_mass_nonincreasing"]
    assert 0 <= rep["defect_total"] <= rep["defect_bound"]
    assert rep["max_increase"]["quadratic"] <= 5 * u0.h


# -- contraction ------------------------------------------------------------------------


def test_contraction_suite_examples():
    f = lambda x: np.sin(2 * np.pi * x)  # noqa: E731
    u = ConservedField.sample(f, 0.0, 1.0, 128)
    v = u.with_values(u.values + 0.3)
    w = ConservedField.sample(lambda x: 0.5 * np.cos(2 * np.pi * x), 0.0, 1.0, 128)
    path = zigzag_path([0.2, 0.5], [0.3, -0.1])
    rep = contraction_suite(burgers(), path, [(u, u), (u, w)])
    assert rep["l1_gap"] <= 1e-12
    assert rep["tv_gap"] <= 1e-12 and rep["lp_gap"]["inf"] <= 1e-12
    shifted = contraction_suite(linear_flux(1.0), path, [(u, v)])
    assert abs(shifted["l1_gap"]) <= 1e-12
    near = Path(path.times, path.values[:, 0] + 0.01 * path.times)
    stab = contraction_suite(burgers(), path, [(u, w)], path_pairs=[(path, near)])
    row = stab["stability"][0]
    assert row["measured"] <= row["bound_C1"]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj.errors import ArgumentError
from roughhj.grid import GridFn
from roughhj.paths import PathEnsembleSpec, linear_path, sample_path, zigzag_path
from roughhj.semilinear import (AffineForms, f_heat, flow_solve, h_linear, h_sin, h_zero,
                                heat_periodic, lipschitz_bound_audit, nonlinearity_from_catalog,
                                operator_from_catalog, solve_semilinear, structure_audit,
                                transform)


def periodic_sine(n=64):
    h = 1.0 / n
    return GridFn(np.sin(2 * np.pi * np.arange(n) * h), 0.0, h, "periodic")


# -- flow table -------------------------------------------------------------------------


def test_flow_of_zero_is_identity():
    v = np.linspace(-1, 1, 11)
    f = flow_solve(h_zero(), v, (-1.0, 1.0), 0.1)
    np.testing.assert_array_equal(f.phi, np.broadcast_to(v, f.phi.shape))
    np.testing.assert_array_equal(f.dphi, 1.0)
    np.testing.assert_array_equal(f.ddphi, 0.0)


def test_flow_of_linear_is_exponential():
    c = 0.7
    v = np.linspace(-2, 2, 21)
    f = flow_solve(h_linear(c), v, (-1.0, 1.5), 1e-3)
    growth = np.exp(c * f.s)[:, None]
    np.testing.assert_allclose(f.phi, v[None, :] * growth, atol=1e-12)
    np.testing.assert_allclose(f.dphi, np.broadcast_to(growth, f.dphi.shape), rtol=1e-12)
    assert np.abs(f.ddphi).max() == 0.0


def test_flow_of_sin_closed_form():
    v = np.linspace(-3, 3, 61)
    f = flow_solve(h_sin(), v, (-1.0, 1.0), 1e-3)
    exact = 2 * np.arctan(np.tan(v[None, :] / 2) * np.exp(f.s[:, None]))
    assert np.abs(f.phi - exact).max() <= 1e-10


def test_flow_lookup_off_grid():
    v = np.linspace(-3, 3, 601)
    f = flow_solve(h_sin(), v, (-0.5, 0.5), 1e-3)
    q = np.array([-2.345, 0.123, 1.987])
    s = 0.3
    phi, dphi, _ = f.lookup(q, s)
    exact = 2 * np.arctan(np.tan(q / 2) * np.exp(s))
    assert np.abs(phi - exact).max() <= 1e-7
    e = np.exp(s)
    dexact = e / (np.cos(q / 2) ** 2 + e * e * np.sin(q / 2) ** 2)
    assert np.abs(dphi - dexact).max() <= 1e-8
    with pytest.raises(ArgumentError):
        f.lookup(q, 0.9)
    with pytest.raises(ArgumentError):
        f.lookup(np.array([5.0]), 0.0)


def test_flow_argument_checks():
    with pytest.raises(ArgumentError):
        flow_solve(h_sin(), [1.0, 0.0], (0.0, 1.0))
    with pytest.raises(ArgumentError):
        flow_solve(h_sin(), [0.0, 1.0], (0.5, 1.0))


@given(st.floats(-2, 2), st.floats(0.1, 2.0))
@settings(max_examples=30, deadline=None)
def test_flow_is_increasing_in_v(c, span):
    v = np.linspace(-2, 2, 41)
    for H in (h_sin(), h_linear(c)):
        f = flow_solve(H, v, (-span, span), 1e-2)
        assert np.all(np.diff(f.phi, axis=1) > 0)
        assert np.all(f.dphi > 0)


def test_flow_rows_export():
    f = flow_solve(h_linear(1.0), np.linspace(0, 1, 3), (0.0, 0.2), 0.1)
    rows = f.to_rows()
    assert rows.shape == (f.s.size * 3, 5)
    assert rows[0].tolist() == [0.0, 0.0, 0.0, 1.0, 0.0]


# -- transformed operator and structure audit ---------------------------------------------


def test_transformed_operator_cancels_for_linear_noise():
    flow = flow_solve(h_linear(0.8), np.linspace(-2, 2, 41), (-1.0, 1.0), 1e-3)
    prob = transform(f_heat(0.3), flow)
    X, p, v = np.array([1.5, -2.0]), np.array([0.4, 3.0]), np.array([0.5, -1.0])
    np.testing.assert_allclose(prob(X, p, v, 0.7), 0.3 * X, rtol=1e-12)


def test_structure_audit():
    heat = structure_audit(f_heat(1.0))
    assert heat["C"] == 0.0 and heat["box_independent"]
    mixed = structure_audit(AffineForms(((0.1, 0.0, 2.0), (0.2, 1.0, -1.0)), "max"))
    assert mixed["upper"] == 1.0 and mixed["lower"] == -2.0
    assert mixed["C"] == 1.0 and mixed["box_independent"]


def test_catalog_parsing():
    assert operator_from_catalog("heat(0.5)").forms == ((0.5, 0.0, 0.0),)
    m = operator_from_catalog("min(0.1,0,0;0.2,1,0)")
    assert m.combine == "min" and len(m.forms) == 2
    assert nonlinearity_from_catalog("linear(2)").name == "linear(2)"
    for bad in ("heat(", "max", "max(1,2)", "cube"):
        with pytest.raises(ArgumentError):
            operator_from_catalog(bad)
    with pytest.raises(ArgumentError):
        nonlinearity_from_catalog("cos")
    with pytest.raises(ArgumentError):
        AffineForms(((-1.0, 0.0, 0.0),))


# -- solver -----------------------------------------------------------------------------


def test_zero_noise_reduces_to_heat():
    errs = []
    for n in (32, 64):
        u0 = periodic_sine(n)
        u = solve_semilinear(f_heat(1.0), h_zero(), linear_path(1.0, 0.01), u0, 0.01)
        errs.append(np.abs(u.values - heat_periodic(u0, 0.01).values).max())
    assert errs[1] <= errs[0] / 3
    assert errs[1] <= 1e-3


def test_linear_noise_matches_scaled_heat():
    u0 = periodic_sine(64)
    nu, c, T = 0.5, 0.8, 0.02
    path = sample_path(PathEnsembleSpec(seed=4, T=T, n=256))
    u = solve_semilinear(f_heat(nu), h_linear(c), path, u0, T)
    exact = np.exp(c * path(T)) * heat_periodic(u0, nu * T).values
    assert np.abs(u.values - exact).max() <= 2e-3


def test_comparison_principle():
    u0 = periodic_sine(64)
    w0 = u0.with_values(u0.values + 0.2 + 0.1 * np.cos(2 * np.pi * u0.x))
    path = zigzag_path([0.01, 0.02], [0.3, -0.1])
    F = operator_from_catalog("max(0.05,0.3,0;0.1,-0.2,0)")
    u = solve_semilinear(F, h_sin(), path, u0, 0.02)
    w = solve_semilinear(F, h_sin(), path, w0, 0.02)
    assert np.all(w.values >= u.values - 1e-12)


def test_snapshots_and_lipschitz_audit():
    u0 = periodic_sine(64)
    snaps, diag = solve_semilinear(f_heat(1.0), h_zero(), linear_path(1.0, 0.02), u0, 0.02,
                                   snapshot_times=[0.0, 0.01, 0.02], return_diagnostics=True)
    assert [t for t, _ in snaps] == [0.0, 0.01, 0.02]
    audit = lipschitz_bound_audit(snaps)
    assert audit["finite"] and audit["nonincreasing"]
    assert audit["C"] == pytest.approx(u0.lipschitz())
    assert diag["monotonicity_margin"] > 0 and diag["flow"].v.size == 4001


def test_solver_argument_checks():
    u0 = periodic_sine(16)
    with pytest.raises(ArgumentError):
        solve_semilinear(f_heat(1.0), h_zero(), linear_path(1.0),
                         GridFn(u0.values, 0.0, u0.h, "linear"), 0.5)
    with pytest.raises(ArgumentError):
        solve_semilinear(f_heat(1.0), h_zero(), linear_path(1.0), u0, 2.0)

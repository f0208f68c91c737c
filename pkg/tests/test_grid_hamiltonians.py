import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj.convex import legendre_brute
from roughhj.errors import ArgumentError, PreconditionError
from roughhj.grid import GridFn, read_grid_csv, sup_diff, write_grid_csv
from roughhj.hamiltonians import (CATALOG_KEYS, abs_h, from_catalog, gassiat2d, power, quadratic,
                                  saturated, table, zero)

# -- grid functions ---------------------------------------------------------------------


def test_grid_validation():
    with pytest.raises(ArgumentError):
        GridFn(np.zeros(1))
    with pytest.raises(ArgumentError):
        GridFn(np.zeros(3), step=0.0)
    with pytest.raises(ArgumentError):
        GridFn(np.zeros(3), boundary="mirror")
    g = GridFn(np.arange(3.0))
    with pytest.raises(ValueError):
        g.values[0] = 5.0


def test_sample_and_periodic_counts():
    assert GridFn.sample(np.sin, 0, 1, 0.25).n == 5
    p = GridFn.sample(np.sin, 0, 1, 0.25, "periodic")
    assert p.n == 4 and p.period == 1.0


def test_linear_extension_and_evaluation():
    g = GridFn(np.array([0.0, 1.0, 1.5]), 0.0, 1.0)
    np.testing.assert_array_equal(g.extended(2), [-2.0, -1.0, 0.0, 1.0, 1.5, 2.0, 2.5])
    np.testing.assert_allclose(g([-1.0, 0.5, 3.0]), [-1.0, 0.5, 2.0])


def test_periodic_extension_and_evaluation():
    g = GridFn(np.array([0.0, 1.0, 2.0, 1.0]), 0.0, 0.25, "periodic")
    np.testing.assert_array_equal(g.extended(1, 2), [1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0])
    np.testing.assert_allclose(g([1.0, 1.125, -0.125]), [0.0, 0.5, 0.5])
    assert g.lipschitz() == 4.0


def test_lipschitz_2d():
    g = GridFn.sample2d(lambda x, y: 2 * x - 3 * y, 0, 1, 0.1)
    assert g.lipschitz() == pytest.approx(3.0)


def test_grid_csv_round_trip(tmp_path):
    g = GridFn.sample(lambda x: np.exp(x) / 3, -1, 1, 0.1)
    f = tmp_path / "g.csv"
    write_grid_csv(g, f)
    back = read_grid_csv(f)
    assert sup_diff(back, g) == 0.0 and back.origin == g.origin
    f.write_text("x,v\n0,1\n0.1,2\n0.3,3\n")
    with pytest.raises(ArgumentError):
        read_grid_csv(f)


# -- Hamiltonians -------------------------------------------------------------------------


def test_catalog_keys_build():
    for key in CATALOG_KEYS:
        assert from_catalog(key).describe()["name"]
    for bad in ("power", "cubic", "abs(", "2x"):
        with pytest.raises(ArgumentError):
            from_catalog(bad)


def test_curvature_flags():
    assert abs_h().is_convex() and quadratic().is_convex()
    assert (-quadratic()).is_concave() and not (-quadratic()).is_convex()
    assert not power(0.25).is_convex() and not power(0.25).is_concave()
    assert not power(0.25).describe()["difference_of_convex"]
    assert power(2.0).is_convex()
    assert not saturated().is_convex()
    assert zero().is_convex() and zero().is_concave()
    assert not gassiat2d().is_convex()


@pytest.mark.parametrize("H", [abs_h(), quadratic(2.0), power(1.5), saturated()],
                         ids=lambda H: H.name)
def test_derivative_matches_finite_differences(H):
    p = np.linspace(-2, 2, 37) + 0.013
    eps = 1e-6
    fd = (H(p + eps) - H(p - eps)) / (2 * eps)
    np.testing.assert_allclose(H.derivative(p), fd, atol=1e-6)


@pytest.mark.parametrize("H", [abs_h(), quadratic(), power(2.0), saturated()],
                         ids=lambda H: H.name)
def test_slope_bound_dominates_samples(H):
    for P in (0.3, 1.0, 3.0):
        p = np.linspace(-P, P, 2001)
        assert np.abs(H.derivative(p)).max() <= H.slope_bound(P) * (1 + 1e-9) + 1e-12


def test_power_below_one_has_unbounded_slope():
    assert power(0.25).slope_bound(1.0) == np.inf


@pytest.mark.parametrize("H", [abs_h(), quadratic(0.5), power(1.5)], ids=lambda H: H.name)
def test_conjugate_matches_brute_force(H):
    P = 2.0
    p = np.linspace(-P, P, 4001)
    q = np.linspace(-3, 3, 31)
    grid = GridFn(H(p), -P, p[1] - p[0])
    np.testing.assert_allclose(H.conjugate(q, P), legendre_brute(grid, q), atol=2e-3)


def test_conjugate_refuses_nonconvex():
    with pytest.raises(PreconditionError):
        saturated().conjugate([0.0], 1.0)


def test_scaling_and_negation():
    H = quadratic()
    p = np.array([-1.0, 0.5, 2.0])
    np.testing.assert_allclose((-H)(p), -H(p))
    np.testing.assert_allclose(H.scaled(3.0)(p), 3 * H(p))
    assert H.scaled(-1.0).is_concave()
    assert H.scaled(0.0).describe()["name"] == "zero"
    assert (-H).minimum(10.0) == pytest.approx(-50.0)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=20))
@settings(max_examples=50, deadline=None)
def test_table_interpolates_its_nodes(vals):
    p = np.linspace(-1, 1, len(vals))
    H = table(p, vals)
    np.testing.assert_allclose(H(p), vals, atol=1e-12)
    slopes = np.abs(np.diff(vals) / np.diff(p))
    assert H.slope_bound(1.0) == pytest.approx(slopes.max())

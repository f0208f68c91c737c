import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj.errors import ArgumentError
from roughhj.paths import (Path, PathEnsembleSpec, approximate, fully_reduce_path, interpolate,
                           linear_path, mollify, oscillation, read_path_csv, reduce_path,
                           running_extrema, running_extrema_series, sample_path, total_variation,
                           write_path_csv, zigzag_path)


def brute_extrema_times(v):
    """Literal alternating-extrema scan with explicit loops (independent oracle)."""
    n = len(v)
    vmax, vmin = max(v), min(v)
    imax = max(i for i in range(n) if v[i] == vmax)
    imin = max(i for i in range(n) if v[i] == vmin)
    tau0, kind0 = (imax, 1) if imax > imin else (imin, -1)
    out = {tau0}
    i, kind = tau0, kind0
    while i < n - 1:
        best = i + 1
        for j in range(i + 1, n):
            better = v[j] <= v[best] if kind > 0 else v[j] >= v[best]
            if better:
                best = j
        out.add(best)
        i, kind = best, -kind
    i, kind = tau0, kind0
    while i > 0:
        best = i - 1
        for j in range(i - 1, -1, -1):
            better = v[j] <= v[best] if kind > 0 else v[j] >= v[best]
            if better:
                best = j
        out.add(best)
        i, kind = best, -kind
    return sorted(out | {0, n - 1})


# -- evaluation ---------------------------------------------------------------


def test_eval_linear_midpoint():
    assert linear_path(1.0)(0.5) == 0.5


def test_eval_origin():
    p = sample_path(PathEnsembleSpec(seed=3, n=50))
    assert p(0.0) == 0.0


def test_eval_sawtooth_quarter():
    p = sample_path(PathEnsembleSpec(T=1.0, n=2, kind="sawtooth", params={"mu": 2.0}))
    assert p(0.25) == pytest.approx(0.5)


def test_eval_out_of_range():
    with pytest.raises(ArgumentError):
        linear_path(1.0)(1.5)


def test_path_invariants_enforced():
    with pytest.raises(ArgumentError):
        Path([0.0, 1.0, 1.0], [0.0, 1.0, 2.0])
    with pytest.raises(ArgumentError):
        Path([0.0, 1.0], [1.0, 2.0])


# -- running extrema and total variation -------------------------------------------


def test_running_extrema_examples():
    assert running_extrema(linear_path(1.0), 1.0) == (1.0, 0.0)
    assert running_extrema(linear_path(-1.0, 2.0), 2.0) == (0.0, -2.0)
    assert running_extrema(zigzag_path([0.5, 1.0], [1.0, -0.5]), 1.0) == (1.0, -0.5)


def test_total_variation_examples():
    assert total_variation(linear_path(3.0)) == 3.0
    assert total_variation(zigzag_path([1, 2, 3], [1, 0, 1])) == 3.0
    n, delta = 5, 0.1
    p = sample_path(PathEnsembleSpec(T=1.0, n=2 * n, kind="sawtooth",
                                     params={"mu": 2 * n * delta}))
    assert total_variation(p) == pytest.approx(2 * n * delta)
    with pytest.raises(ArgumentError):
        total_variation(linear_path(1.0), 0.5, 0.5)


# -- reduction --------------------------------------------------------------


def test_reduce_monotone_is_line():
    p = Path([0, 0.3, 1.0], [0, 0.5, 2.0])
    r = reduce_path(p)
    assert r == Path([0, 1.0], [0, 2.0])


def test_reduce_alternating_is_identity():
    p = zigzag_path([0.25, 0.5, 0.75, 1.0], [1.0, -1.0, 0.5, -0.5])
    assert reduce_path(p) == p


def test_reduce_constant_path():
    p = Path([0, 0.5, 1.0], [0, 0, 0])
    assert reduce_path(p) == Path([0, 1.0], [0, 0])


@pytest.mark.parametrize("seed", range(5))
def test_reduce_brownian_against_brute_scan(seed):
    p = sample_path(PathEnsembleSpec(seed=seed, n=400))
    r = reduce_path(p)
    idx = brute_extrema_times(list(p.values[:, 0]))
    np.testing.assert_array_equal(r.times, p.times[idx])
    np.testing.assert_array_equal(r.values[:, 0], p.values[idx, 0])


def test_fully_reduce_examples():
    mono = linear_path(2.0)
    assert fully_reduce_path(mono) == reduce_path(mono)
    # global max at 0.5, then a small oscillation
    p = zigzag_path([0.5, 0.7, 0.8, 1.0], [2.0, 1.0, 1.5, 0.5])
    f = fully_reduce_path(p)
    assert f == zigzag_path([0.5, 1.0], [2.0, 0.5])
    # last global extremum at T: both reductions coincide
    q = zigzag_path([0.5, 1.0], [-1.0, 2.0])
    assert fully_reduce_path(q) == reduce_path(q)


knots = st.lists(st.floats(-3, 3, allow_nan=False, width=32), min_size=2, max_size=30)


@given(knots)
@settings(max_examples=200, deadline=None)
def test_reduce_properties(vals):
    t = np.linspace(0, 1, len(vals) + 1)
    p = Path(t, [0.0] + list(vals))
    r = reduce_path(p)
    assert reduce_path(r) == r
    assert total_variation(r) <= total_variation(p) + 1e-9
    assert r.values.max() == p.values.max()
    assert r.values.min() == p.values.min()
    assert r(1.0) == p(1.0)


@given(knots, st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_eval_within_knot_range_and_monotone_extrema(vals, t):
    p = Path(np.linspace(0, 1, len(vals) + 1), [0.0] + list(vals))
    assert p.values.min() <= p(t) <= p.values.max()
    M, m = running_extrema_series(p)
    assert np.all(np.diff(M) >= 0) and np.all(np.diff(m) <= 0)


# -- sampling and approximation --------------------------------------------------


def test_sample_linear():
    p = sample_path(PathEnsembleSpec(T=1.0, n=1, kind="linear", params={"slope": 1.0}))
    assert p == Path([0, 1], [0, 1])


def test_sample_deterministic():
    spec = PathEnsembleSpec(seed=2**63 + 5, T=1.0, n=256)
    assert sample_path(spec) == sample_path(spec)
    assert sample_path(spec) != sample_path(PathEnsembleSpec(seed=6, T=1.0, n=256))


def test_sample_rejects_zero_resolution():
    with pytest.raises(ArgumentError):
        sample_path(PathEnsembleSpec(n=0))


def test_components_independent_streams():
    p = sample_path(PathEnsembleSpec(seed=1, n=1000, params={"components": 2}))
    c = np.corrcoef(np.diff(p.values, axis=0).T)[0, 1]
    assert abs(c) < 0.1


def _range_mean(n, seeds):
    r = [np.ptp(sample_path(PathEnsembleSpec(seed=s, n=n)).values) for s in seeds]
    return float(np.mean(r))


@pytest.mark.slow
def test_brownian_range_against_fine_grid_oracle():
    coarse = _range_mean(4096, range(1000))
    fine = _range_mean(2 ** 16, range(10_000, 10_200))
    assert abs(coarse - fine) <= 0.1 * fine


def test_interpolate_examples():
    p = sample_path(PathEnsembleSpec(seed=4, n=64))
    line = interpolate(p, 1.0)
    assert line.times.tolist() == [0.0, 1.0] and line(1.0) == p(1.0)
    z = zigzag_path([0.25, 0.5, 0.75, 1.0], [1, 0, 1, 0])
    assert interpolate(z, 0.25) == z
    with pytest.raises(ArgumentError):
        approximate(z, "interpolate", 2.0)


def test_mollify_close_to_oscillation():
    n = 4096
    p = sample_path(PathEnsembleSpec(seed=9, n=n))
    eps = 1.0 / 64
    m = mollify(p, eps)
    grid = np.linspace(0, 1, 2049)
    dist = np.abs(m(grid) - p(grid)).max()
    assert m(0.0) == 0.0
    assert dist <= 2.0 * oscillation(p, 2 * eps)


def test_path_csv_roundtrip(tmp_path):
    p = sample_path(PathEnsembleSpec(seed=1, n=17, params={"components": 2}))
    f = tmp_path / "p.csv"
    write_path_csv(p, f)
    assert read_path_csv(f) == p
    assert f.read_text().splitlines()[0] == "t,v1,v2"


@pytest.mark.slow
def test_reduced_tv_tail_decays():
    tvs = np.array([total_variation(reduce_path(sample_path(PathEnsembleSpec(seed=s, n=4096))))
                    for s in range(500)])
    assert np.isfinite(np.percentile(tvs, 99))
    assert np.mean(tvs > 8) < np.mean(tvs > 4)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughhj import _pykernels, kernels

try:
    from roughhj import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
TAGS = np.array([kernels.TAG_ABS, kernels.TAG_QUADRATIC, kernels.TAG_SATURATED])


def loop_window_max(ext, kernel):
    n = len(ext) - len(kernel) + 1
    return [max(ext[i + j] - kernel[j] for j in range(len(kernel)) if np.isfinite(kernel[j]))
            for i in range(n)]


@pytest.mark.parametrize("mod", BACKENDS)
def test_window_max_against_loops(mod):
    rng = np.random.default_rng(0)
    ext = rng.normal(size=40)
    kernel = rng.uniform(0, 1, 7)
    kernel[2] = np.inf
    np.testing.assert_allclose(mod.window_max(ext, kernel), loop_window_max(ext, kernel))


@pytest.mark.parametrize("mod", BACKENDS)
def test_lower_hull_examples(mod):
    x = np.arange(5.0)
    f = np.array([0.0, 1.0, 0.0, 1.0, 0.0])
    # collinear minima: the middle one lies on the chord and is dropped
    assert list(mod.lower_hull(x, f, 1e12)) == [0, 4]
    assert list(mod.lower_hull(x, np.array([1.0, 0.0, 0.5, 0.0, 1.0]), 1e12)) == [0, 1, 3, 4]
    f2 = np.array([1.0, 0.0, 5.0, 0.0, 1.0])
    assert list(mod.lower_hull(x, f2, 4.0)) == [0, 1, 3, 4]


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
@given(st.integers(0, 2 ** 16), st.booleans())
@settings(max_examples=60, deadline=None)
def test_backends_agree_on_marching(seed, periodic):
    rng = np.random.default_rng(seed)
    n, h = 50, 0.05
    u = np.cumsum(rng.uniform(-1, 1, n)) * h
    dB = rng.uniform(-0.5, 0.5, (8, 3)) * h / 3
    params = np.array([0.0, 1.0, 0.0])
    scales = np.array([1.0, 1.0, 1.0])
    a = _pykernels.lf_run_1d(u, dB, h, 1.0, TAGS, params, scales, periodic, 0.3, -0.2)
    b = _ckernels.lf_run_1d(u, dB, h, 1.0, TAGS, params, scales, periodic, 0.3, -0.2)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
def test_backends_agree_in_two_dimensions():
    rng = np.random.default_rng(1)
    u = rng.normal(size=(20, 24)) * 0.05
    dB = rng.uniform(-0.01, 0.01, (5, 1))
    xt, yt = np.array([kernels.TAG_ABS]), np.array([kernels.TAG_ABS])
    one, zero = np.array([1.0]), np.array([0.0])
    ghost = tuple(np.zeros(k) for k in (24, 24, 20, 20))
    a = _pykernels.lf_run_2d(u, dB, 0.1, 0.1, 1.0, xt, zero, one, yt, zero, -one, False, ghost)
    b = _ckernels.lf_run_2d(u, dB, 0.1, 0.1, 1.0, xt, zero, one, yt, zero, -one, False, ghost)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")

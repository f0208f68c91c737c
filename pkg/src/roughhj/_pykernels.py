"""Pure numpy implementations of the numerical kernels.

This module mirrors the compiled ``_ckernels`` extension function for function.
It is used when the extension is unavailable or when ``ROUGHHJ_PURE_PYTHON``
is set in the environment.
"""

import numpy as np

# Hamiltonian tags understood by the time-marching kernels.
TAG_ABS = 0
TAG_QUADRATIC = 1
TAG_POWER = 2
TAG_SATURATED = 3
TAG_ZERO = 4


def window_max(ext, kernel):
    """Max-plus correlation ``out[i] = max_j ext[i + j] - kernel[j]``.

    Parameters
    ----------
    ext : ndarray
        Padded samples of length ``n + len(kernel) - 1``.
    kernel : ndarray
        Penalty values, ``+inf`` entries are skipped.

    Returns
    -------
    ndarray
        Array of length ``n``.
    """
    ext = np.asarray(ext, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    w = kernel.size
    n = ext.size - w + 1
    out = np.full(n, -np.inf)
    for j in range(w):
        if np.isfinite(kernel[j]):
            np.maximum(out, ext[j:j + n] - kernel[j], out=out)
    return out


def lower_hull(x, f, cutoff):
    """Indices of the vertices of the lower convex hull of ``(x, f)``.

    Points with ``f >= cutoff`` are ignored. ``x`` must be increasing.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    hull = []
    for i in range(x.size):
        if not f[i] < cutoff:
            continue
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or above the chord from a to i
            if (f[b] - f[a]) * (x[i] - x[a]) >= (f[i] - f[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.intp)


def eval_tagged(tag, param, p):
    """Evaluate a tagged Hamiltonian elementwise."""
    if tag == TAG_ABS:
        return np.abs(p)
    if tag == TAG_QUADRATIC:
        return 0.5 * param * p * p
    if tag == TAG_POWER:
        return np.abs(p) ** param
    if tag == TAG_SATURATED:
        q = p * p
        return q / (2.0 * (1.0 + q))
    if tag == TAG_ZERO:
        return np.zeros_like(p)
    raise ValueError(f"unknown Hamiltonian tag {tag}")


def _neighbours(u, periodic, slope_lo, slope_hi, h, axis):
    """Return (u[i+1], u[i-1]) along ``axis`` with boundary ghosts."""
    if periodic:
        return np.roll(u, -1, axis=axis), np.roll(u, 1, axis=axis)
    up = np.empty_like(u)
    um = np.empty_like(u)
    n = u.shape[axis]
    sl_up = [slice(None)] * u.ndim
    sl_src = [slice(None)] * u.ndim
    sl_up[axis] = slice(0, n - 1)
    sl_src[axis] = slice(1, n)
    up[tuple(sl_up)] = u[tuple(sl_src)]
    um[tuple(sl_src)] = u[tuple(sl_up)]
    last = [slice(None)] * u.ndim
    first = [slice(None)] * u.ndim
    last[axis] = n - 1
    first[axis] = 0
    up[tuple(last)] = u[tuple(last)] + slope_hi * h
    um[tuple(first)] = u[tuple(first)] - slope_lo * h
    return up, um


def lf_run_1d(u, dB, h, theta, tags, params, scales, periodic, slope_lo, slope_hi):
    """March the first-order scheme through all rows of ``dB``.

    Parameters
    ----------
    u : ndarray, shape (n,)
        Initial values.
    dB : ndarray, shape (steps, m)
        Path increments per step and component.
    h, theta : float
        Mesh size and viscosity weight.
    tags, params, scales : sequences of length m
        Tagged Hamiltonians ``scale * H_tag(p; param)`` per component.
    periodic : bool
        Periodic grid when true, otherwise frozen-slope ghost cells.
    slope_lo, slope_hi : float
        Ghost slopes at the left and right ends (ignored when periodic).
    """
    u = np.array(u, dtype=float)
    dB = np.asarray(dB, dtype=float)
    half_theta = 0.5 * theta
    two_h = 2.0 * h
    for k in range(dB.shape[0]):
        up, um = _neighbours(u, periodic, slope_lo, slope_hi, h, 0)
        p = (up - um) / two_h
        acc = u.copy()
        for c in range(dB.shape[1]):
            if dB[k, c] != 0.0:
                acc = acc + scales[c] * eval_tagged(tags[c], params[c], p) * dB[k, c]
        u = acc + half_theta * ((up + um) - 2.0 * u)
    return u


def lf_run_2d(u, dB, hx, hy, theta, xtags, xparams, xscales, ytags, yparams,
              yscales, periodic, slopes):
    """Two-dimensional analogue of :func:`lf_run_1d` for separable Hamiltonians.

    Each component contributes ``xscale * Hx(p) + yscale * Hy(q)``; the
    viscosity weight is ``theta / 2`` split evenly between the two axes.
    ``slopes`` holds ``(x_lo, x_hi, y_lo, y_hi)`` ghost slopes.
    """
    u = np.array(u, dtype=float)
    dB = np.asarray(dB, dtype=float)
    quarter_theta = 0.25 * theta
    for k in range(dB.shape[0]):
        xp, xm = _neighbours(u, periodic, slopes[0], slopes[1], hx, 0)
        yp, ym = _neighbours(u, periodic, slopes[2], slopes[3], hy, 1)
        p = (xp - xm) / (2.0 * hx)
        q = (yp - ym) / (2.0 * hy)
        acc = u.copy()
        for c in range(dB.shape[1]):
            if dB[k, c] != 0.0:
                hval = (xscales[c] * eval_tagged(xtags[c], xparams[c], p)
                        + yscales[c] * eval_tagged(ytags[c], yparams[c], q))
                acc = acc + hval * dB[k, c]
        u = acc + quarter_theta * (((xp + xm) - 2.0 * u) + ((yp + ym) - 2.0 * u))
    return u

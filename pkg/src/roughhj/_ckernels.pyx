# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numerical kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, isfinite

cnp.import_array()

DEF TAG_ABS = 0
DEF TAG_QUADRATIC = 1
DEF TAG_POWER = 2
DEF TAG_SATURATED = 3
DEF TAG_ZERO = 4


cdef inline double _ham(int tag, double param, double p) noexcept nogil:
    cdef double q
    if tag == TAG_ABS:
        return fabs(p)
    elif tag == TAG_QUADRATIC:
        return 0.5 * param * p * p
    elif tag == TAG_POWER:
        return pow(fabs(p), param)
    elif tag == TAG_SATURATED:
        q = p * p
        return q / (2.0 * (1.0 + q))
    return 0.0


def window_max(ext, kernel):
    """Max-plus correlation ``out[i] = max_j ext[i + j] - kernel[j]``."""
    cdef const double[::1] e = np.ascontiguousarray(ext, dtype=np.float64)
    cdef const double[::1] k = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t w = k.shape[0]
    cdef Py_ssize_t n = e.shape[0] - w + 1
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, off, nf = 0
    cdef double best, val
    # compress the finite part of the kernel once
    idx_arr = np.empty(w, dtype=np.intp)
    kv_arr = np.empty(w, dtype=np.float64)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef double[::1] kv = kv_arr
    for j in range(w):
        if isfinite(k[j]):
            idx[nf] = j
            kv[nf] = k[j]
            nf += 1
    with nogil:
        for i in range(n):
            out[i] = -1.0 / 0.0
        # kernel offset outermost: the inner loop is contiguous and vectorizes
        for j in range(nf):
            off = idx[j]
            val = kv[j]
            for i in range(n):
                best = e[i + off] - val
                out[i] = best if best > out[i] else out[i]
    return out_arr


def lower_hull(x, f, double cutoff):
    """Indices of the vertices of the lower convex hull of ``(x, f)``."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    hull_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] hull = hull_arr
    cdef Py_ssize_t top = 0, i, a, b
    with nogil:
        for i in range(n):
            if not fv[i] < cutoff:
                continue
            while top >= 2:
                a = hull[top - 2]
                b = hull[top - 1]
                if (fv[b] - fv[a]) * (xv[i] - xv[a]) >= (fv[i] - fv[a]) * (xv[b] - xv[a]):
                    top -= 1
                else:
                    break
            hull[top] = i
            top += 1
    return hull_arr[:top].copy()


def lf_run_1d(u, dB, double h, double theta, tags, params, scales, bint periodic,
              double slope_lo, double slope_hi):
    """March the first-order scheme through all rows of ``dB``."""
    cur_arr = np.array(u, dtype=np.float64)
    nxt_arr = np.empty_like(cur_arr)
    cdef double[::1] cur = cur_arr
    cdef double[::1] nxt = nxt_arr
    cdef double[::1] tmp
    cdef const double[:, ::1] db = np.ascontiguousarray(dB, dtype=np.float64)
    cdef const long[::1] tg = np.ascontiguousarray(tags, dtype=np.int64)
    cdef const double[::1] pr = np.ascontiguousarray(params, dtype=np.float64)
    cdef const double[::1] sc = np.ascontiguousarray(scales, dtype=np.float64)
    cdef Py_ssize_t n = cur.shape[0], steps = db.shape[0], m = db.shape[1]
    cdef Py_ssize_t k, i, c
    cdef double up, um, p, acc, d
    cdef double half_theta = 0.5 * theta, two_h = 2.0 * h
    with nogil:
        for k in range(steps):
            for i in range(n):
                if i + 1 < n:
                    up = cur[i + 1]
                elif periodic:
                    up = cur[0]
                else:
                    up = cur[i] + slope_hi * h
                if i > 0:
                    um = cur[i - 1]
                elif periodic:
                    um = cur[n - 1]
                else:
                    um = cur[i] - slope_lo * h
                p = (up - um) / two_h
                acc = cur[i]
                for c in range(m):
                    d = db[k, c]
                    if d != 0.0:
                        acc = acc + sc[c] * _ham(tg[c], pr[c], p) * d
                nxt[i] = acc + half_theta * ((up + um) - 2.0 * cur[i])
            tmp = cur
            cur = nxt
            nxt = tmp
    return np.asarray(cur).copy()


def lf_run_2d(u, dB, double hx, double hy, double theta, xtags, xparams, xscales,
              ytags, yparams, yscales, bint periodic, slopes):
    """Two-dimensional separable analogue of :func:`lf_run_1d`."""
    cur_arr = np.array(u, dtype=np.float64)
    nxt_arr = np.empty_like(cur_arr)
    cdef double[:, ::1] cur = cur_arr
    cdef double[:, ::1] nxt = nxt_arr
    cdef double[:, ::1] tmp
    cdef const double[:, ::1] db = np.ascontiguousarray(dB, dtype=np.float64)
    cdef const long[::1] xt = np.ascontiguousarray(xtags, dtype=np.int64)
    cdef const long[::1] yt = np.ascontiguousarray(ytags, dtype=np.int64)
    cdef const double[::1] xp_ = np.ascontiguousarray(xparams, dtype=np.float64)
    cdef const double[::1] yp_ = np.ascontiguousarray(yparams, dtype=np.float64)
    cdef const double[::1] xs = np.ascontiguousarray(xscales, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(yscales, dtype=np.float64)
    nx_, ny_ = cur_arr.shape
    cdef const double[::1] sxl = np.ascontiguousarray(np.broadcast_to(slopes[0], (ny_,)), dtype=np.float64)
    cdef const double[::1] sxh = np.ascontiguousarray(np.broadcast_to(slopes[1], (ny_,)), dtype=np.float64)
    cdef const double[::1] syl = np.ascontiguousarray(np.broadcast_to(slopes[2], (nx_,)), dtype=np.float64)
    cdef const double[::1] syh = np.ascontiguousarray(np.broadcast_to(slopes[3], (nx_,)), dtype=np.float64)
    cdef Py_ssize_t nx = nx_, ny = ny_, steps = db.shape[0], m = db.shape[1]
    cdef Py_ssize_t k, i, j, c
    cdef double xpv, xmv, ypv, ymv, p, q, acc, d, hval, u0
    cdef double quarter_theta = 0.25 * theta
    cdef double two_hx = 2.0 * hx, two_hy = 2.0 * hy
    with nogil:
        for k in range(steps):
            for i in range(nx):
                for j in range(ny):
                    u0 = cur[i, j]
                    if i + 1 < nx:
                        xpv = cur[i + 1, j]
                    elif periodic:
                        xpv = cur[0, j]
                    else:
                        xpv = u0 + sxh[j] * hx
                    if i > 0:
                        xmv = cur[i - 1, j]
                    elif periodic:
                        xmv = cur[nx - 1, j]
                    else:
                        xmv = u0 - sxl[j] * hx
                    if j + 1 < ny:
                        ypv = cur[i, j + 1]
                    elif periodic:
                        ypv = cur[i, 0]
                    else:
                        ypv = u0 + syh[i] * hy
                    if j > 0:
                        ymv = cur[i, j - 1]
                    elif periodic:
                        ymv = cur[i, ny - 1]
                    else:
                        ymv = u0 - syl[i] * hy
                    p = (xpv - xmv) / two_hx
                    q = (ypv - ymv) / two_hy
                    acc = u0
                    for c in range(m):
                        d = db[k, c]
                        if d != 0.0:
                            hval = xs[c] * _ham(xt[c], xp_[c], p) + ys[c] * _ham(yt[c], yp_[c], q)
                            acc = acc + hval * d
                    nxt[i, j] = acc + quarter_theta * (((xpv + xmv) - 2.0 * u0) + ((ypv + ymv) - 2.0 * u0))
            tmp = cur
            cur = nxt
            nxt = tmp
    return np.asarray(cur).copy()

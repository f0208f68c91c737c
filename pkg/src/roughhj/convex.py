"""Discrete convex analysis and variational solution formulas.

Conventions
-----------
``exact_step(H, u0, tau)`` evolves ``u_t = H(Du)`` for ``tau > 0`` and
``u_t = -H(Du)`` for duration ``|tau|`` when ``tau < 0``. It is exact on the
grid for convex or concave ``H`` through a max-plus (or min-plus)
convolution with the conjugate of ``H``.

:func:`lax_oleinik_solve` uses the classical sign ``u_t + H(Du) = 0``;
:func:`hopf_solve` uses ``u_t = H(Du)``.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import ArgumentError, PreconditionError
from .grid import GridFn
from .hamiltonians import Hamiltonian

#: Value standing in for ``+inf`` on grids.
SENTINEL = 1e12


def _finite_mask(f, sentinel):
    return f < 0.5 * sentinel


# -----------------------------------------------------------------------------
# conjugates and envelopes


def legendre_brute(f: GridFn, q) -> np.ndarray:
    """``max_p (q p - f(p))`` by exhaustive search; the reference implementation."""
    p = f.x
    v = f.values
    keep = _finite_mask(v, SENTINEL)
    p, v = p[keep], v[keep]
    q = np.asarray(q, dtype=float)
    out = np.empty(q.size)
    chunk = max(1, 4_000_000 // max(p.size, 1))
    for i in range(0, q.size, chunk):
        qq = q[i:i + chunk, None]
        out[i:i + chunk] = np.max(qq * p[None, :] - v[None, :], axis=1)
    return out


def _hull(f: GridFn, sentinel=SENTINEL):
    p = f.x
    idx = kernels.lower_hull(p, f.values, 0.5 * sentinel)
    if idx.size == 0:
        raise ArgumentError("function is +inf everywhere")
    return p[idx], f.values[idx]


def slope_range(f: GridFn):
    """Smallest and largest slope of the convex envelope of ``f``."""
    hp, hv = _hull(f)
    if hp.size == 1:
        return 0.0, 0.0
    s = np.diff(hv) / np.diff(hp)
    return float(s[0]), float(s[-1])


def legendre(f: GridFn, q=None, n: int | None = None) -> GridFn:
    """Legendre-Fenchel conjugate of a 1D grid function.

    Parameters
    ----------
    f : GridFn
        Samples of ``f``; values above ``SENTINEL / 2`` are treated as ``+inf``.
    q : array_like, optional
        Uniform output grid. Defaults to ``n`` points spanning the slope range
        of the convex envelope of ``f``.
    n : int, optional
        Number of output points when ``q`` is inferred (default: ``f.n``).

    Returns
    -------
    GridFn
        ``f*(q) = max_p (q p - f(p))`` over the grid points ``p``.

    Notes
    -----
    Only vertices of the lower hull can be maximizers, and the maximizing
    vertex moves monotonically with ``q``. The vertex for each ``q`` is found
    by locating ``q`` among the sorted hull slopes.
    """
    hp, hv = _hull(f)
    if q is None:
        if hp.size < 2:
            raise ArgumentError("empty slope range: cannot infer the dual grid")
        s = np.diff(hv) / np.diff(hp)
        n = f.n if n is None else n
        q = np.linspace(s[0], s[-1], n)
        if s[0] == s[-1]:
            raise ArgumentError("empty slope range: cannot infer the dual grid")
    q = np.asarray(q, dtype=float)
    if q.size < 2 or np.any(np.diff(q) <= 0):
        raise ArgumentError("dual grid must be increasing with at least two points")
    out = _legendre_on_hull(hp, hv, q)
    return GridFn(out, q[0], (q[-1] - q[0]) / (q.size - 1), "linear")


def _legendre_on_hull(hp, hv, q):
    if hp.size == 1:
        return q * hp[0] - hv[0]
    s = np.diff(hv) / np.diff(hp)
    # vertex k maximizes q p - f(p) iff s[k-1] <= q <= s[k]; side="left" keeps
    # the lowest index on ties
    k = np.searchsorted(s, q, side="left")
    return q * hp[k] - hv[k]


def convex_envelope(f: GridFn, sentinel: float = SENTINEL) -> GridFn:
    """Largest convex minorant of ``f`` on its grid (``f**`` restricted to the grid).

    Sentinel (``+inf``) values are excluded from the vertex set; points outside
    the finite range stay at the sentinel.
    """
    x = f.x
    idx = kernels.lower_hull(x, f.values, 0.5 * sentinel)
    out = np.full(f.n, float(sentinel))
    if idx.size:
        a, b = idx[0], idx[-1] + 1
        out[a:b] = np.interp(x[a:b], x[idx], f.values[idx])
    return f.with_values(out)


def is_convex(f: GridFn, rel_tol: float = 1e-8) -> bool:
    """Nonnegative second differences up to ``rel_tol * max |f|``."""
    v = f.values
    keep = _finite_mask(v, SENTINEL)
    v = v[keep]
    if v.size < 3:
        return True
    scale = max(1.0, float(np.abs(v).max()))
    d2 = v[2:] - 2 * v[1:-1] + v[:-2]
    return bool(np.all(d2 >= -rel_tol * scale))


# -----------------------------------------------------------------------------
# solution formulas


def _convex_representative(H: Hamiltonian):
    if H.is_convex():
        return H, 1
    if H.is_concave():
        return -H, -1
    raise PreconditionError(
        f"{H.name} is neither convex nor concave; use the scheme solver instead")


def _sup_convolution(u0: GridFn, G: Hamiltonian, tau: float, reflect: bool = False) -> GridFn:
    """``max_y [u0(y) - tau G*((y - x)/tau)]`` on the grid (``reflect`` uses ``G*(-q)``)."""
    h = u0.h
    P = u0.lipschitz() * (1 + 1e-12) + 1e-300
    S = G.slope_bound(P)
    if not np.isfinite(S):
        raise PreconditionError(f"{G.name} has unbounded slope on the data's gradient range")
    r = int(np.ceil(tau * S / h)) + 1
    offsets = np.arange(-r, r + 1) * h
    with np.errstate(over="ignore"):  # subnormal tau: off-centre slopes become +-inf
        qs = offsets / tau
    if reflect:
        qs = -qs
    kernel = tau * G.conjugate(qs, P)
    ext = u0.extended(r)
    return u0.with_values(kernels.window_max(ext, kernel))


def exact_step(H: Hamiltonian, u0: GridFn, tau: float) -> GridFn:
    """Exact grid solution operator ``S_H(tau)`` for convex or concave ``H``.

    ``tau >= 0`` evolves ``u_t = H(Du)``; ``tau < 0`` evolves ``u_t = -H(Du)``
    for time ``|tau|``.
    """
    if u0.dim != 1:
        raise ArgumentError("exact operators are implemented in 1D")
    if tau == 0:
        return u0
    G, curv = _convex_representative(H)
    direction = np.sign(tau) * curv
    t = abs(tau)
    if direction > 0:
        return _sup_convolution(u0, G, t)
    # min-plus form via negation: min_y [u0(y) + t G*((x - y)/t)]
    neg = u0.with_values(-u0.values)
    out = _sup_convolution(neg, G, t, reflect=True)
    return u0.with_values(-out.values)


def lax_oleinik_solve(H: Hamiltonian, u0: GridFn, t: float) -> GridFn:
    """Solve ``u_t + H(Du) = 0`` by the Lax-Oleinik formula.

    For convex ``H`` this is ``min_y [u0(y) + t H*((x - y)/t)]`` and for concave
    ``H`` the analogous max formula. The optimization runs over grid points
    within ``t * max|H'|`` of ``x``, which contains every optimizer for data
    whose Lipschitz constant bounds the gradients.

    Examples
    --------
    >>> from roughhj.hamiltonians import quadratic
    >>> u0 = GridFn.sample(lambda x: 0.5 * x**2, -2, 2, 0.01)
    >>> u = lax_oleinik_solve(quadratic(), u0, 1.0)
    >>> abs(u(0.5) - 0.25 / 4) < 0.01
    True
    """
    if not t > 0:
        raise ArgumentError("time must be positive")
    return exact_step(-H, u0, t)


def hopf_solve(H: Hamiltonian, u0: GridFn, t: float, rel_tol: float = 1e-8) -> GridFn:
    """Hopf formula ``max_p [p x + t H(p) - u0*(p)]`` for convex data.

    Valid for any continuous ``H`` and either sign of ``t`` (solving
    ``u_t = H(Du)``). The dual grid consists of the slopes of ``u0`` together
    with a uniform refinement of their range.
    """
    if u0.dim != 1:
        raise ArgumentError("Hopf formula is implemented in 1D")
    if not is_convex(u0, rel_tol):
        raise PreconditionError("initial data is not convex")
    hp, hv = _hull(u0)
    if hp.size == 1:
        raise ArgumentError("need at least two grid points")
    slopes = np.diff(hv) / np.diff(hp)
    p = np.union1d(slopes, np.linspace(slopes[0], slopes[-1], u0.n))
    ustar = _legendre_on_hull(hp, hv, p)
    score = t * H(p) - ustar
    x = u0.x
    out = np.empty(x.size)
    chunk = max(1, 4_000_000 // p.size)
    for i in range(0, x.size, chunk):
        xx = x[i:i + chunk, None]
        out[i:i + chunk] = np.max(xx * p[None, :] + score[None, :], axis=1)
    return u0.with_values(out)


# -----------------------------------------------------------------------------
# iterated Hopf formula


def hopf_iterate(H: Hamiltonian, delta: float, steps: int, n: int = 2001,
                 pmax: float = 1.25, sentinel: float = SENTINEL,
                 threshold: float | None = None):
    """Alternating biconjugation ``w_{k+1} = (w_k +/- delta H)**``.

    Starts from the indicator ``w_0 = 0`` on ``|p| <= 1`` and ``sentinel``
    elsewhere. Even steps add ``delta H``, odd steps subtract it.

    Parameters
    ----------
    H : Hamiltonian
    delta : float
        Increment size (``delta >= 0``).
    steps : int
        Number of iterations ``k``.
    n : int
        Grid points on ``[-pmax, pmax]``.
    threshold : float, optional
        Blow-up is flagged once ``m_k`` exceeds this value. Defaults to
        ``10 * delta * max_{|p|<=1} |H|``, a bound never reached when ``H`` is
        a difference of convex functions in the catalog.

    Returns
    -------
    trajectory : list of (GridFn, float)
        ``(w_k, m_k)`` for ``k = 0..steps`` with ``m_k = -min_{|p|<=1} w_k``.
    blew_up : bool
    """
    if delta < 0:
        raise ArgumentError("delta must be nonnegative")
    p = np.linspace(-pmax, pmax, n)
    inside = np.abs(p) <= 1 + 1e-12
    w = GridFn(np.where(inside, 0.0, sentinel), -pmax, 2 * pmax / (n - 1))
    hp = H(p)
    if threshold is None:
        threshold = 10.0 * delta * float(np.abs(hp[inside]).max())
    traj = [(w, -float(w.values[inside].min()))]
    blew_up = False
    for k in range(steps):
        sign = 1.0 if k % 2 == 0 else -1.0
        vals = w.values.copy()
        fin = _finite_mask(vals, sentinel)
        vals[fin] += sign * delta * hp[fin]
        w = convex_envelope(w.with_values(vals), sentinel)
        mk = -float(w.values[inside].min())
        traj.append((w, mk))
        if not np.isfinite(mk) or mk > threshold:
            blew_up = True
    return traj, blew_up


def growth_exponent(ms, kmin: int = 20) -> float:
    """Least-squares slope of ``log m_k`` against ``log k`` for ``k >= kmin``."""
    ms = np.asarray(ms, dtype=float)
    k = np.arange(ms.size)
    sel = (k >= kmin) & (ms > 0)
    if sel.sum() < 2:
        raise ArgumentError("not enough positive terms to fit an exponent")
    return float(np.polyfit(np.log(k[sel]), np.log(ms[sel]), 1)[0])

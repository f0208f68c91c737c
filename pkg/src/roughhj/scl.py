"""Scalar conservation laws ``du + A(u)_x dB = 0`` driven by a continuous path.

On each linear piece of the path with increment ``dB`` the equation is the
classical ``u_t + sign(dB) A(u)_x = 0`` run for time ``|dB|``; pieces are
composed in order. Each classical run uses the Engquist-Osher monotone flux.
Kinetic diagnostics work with ``chi(x, xi) = 1`` on ``0 <= xi <= u``,
``-1`` on ``u <= xi <= 0`` and ``0`` elsewhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, CFLError
from .paths import Path

SAFETY = 0.9


# -----------------------------------------------------------------------------
# fluxes


@dataclass(frozen=True)
class Flux:
    """Flux ``A`` with ``a = A'``, ``A''`` and the Engquist-Osher splitting.

    ``plus(u) = A(0) + int_0^u max(A', 0)`` and ``minus(u) = int_0^u min(A', 0)``,
    so ``A = plus + minus``.
    """

    name: str
    A: object
    a: object
    da: object
    plus: object
    minus: object
    convex: bool
    notes: str = ""

    def __call__(self, u):
        return self.A(np.asarray(u, dtype=float))

    def max_speed(self, lo: float, hi: float) -> float:
        """``max |A'|`` on ``[lo, hi]`` (sampled, endpoints included)."""
        u = np.linspace(lo, hi, 257)
        return float(np.abs(self.a(u)).max())

    def max_curvature(self, lo: float, hi: float) -> float:
        u = np.linspace(lo, hi, 257)
        return float(np.abs(self.da(u)).max())

    def describe(self) -> dict:
        return {"name": self.name, "convex": self.convex, "notes": self.notes}


def burgers() -> Flux:
    """``A(u) = u^2 / 2``."""
    return Flux("burgers", lambda u: 0.5 * u * u, lambda u: np.asarray(u, float),
                lambda u: np.ones_like(np.asarray(u, float)),
                lambda u: 0.5 * np.maximum(u, 0.0) ** 2,
                lambda u: 0.5 * np.minimum(u, 0.0) ** 2, True, "convex")


def cubic() -> Flux:
    """``A(u) = u^3 / 3``: increasing, with an inflection point at 0."""
    return Flux("cubic", lambda u: u ** 3 / 3.0, lambda u: np.asarray(u, float) ** 2,
                lambda u: 2.0 * np.asarray(u, float), lambda u: u ** 3 / 3.0,
                lambda u: np.zeros_like(np.asarray(u, float)), False, "nonconvex")


def linear_flux(c: float = 1.0) -> Flux:
    """``A(u) = c u``: transport with speed ``c``."""
    return Flux(f"linear({c:g})", lambda u: c * np.asarray(u, float),
                lambda u: np.full_like(np.asarray(u, float), c),
                lambda u: np.zeros_like(np.asarray(u, float)),
                lambda u: max(c, 0.0) * np.asarray(u, float),
                lambda u: min(c, 0.0) * np.asarray(u, float), True, "linear")


def table_flux(u, values, name: str = "table") -> Flux:
    """Piecewise-linear flux through the samples ``(u, values)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(values, dtype=float)
    if u.size < 2 or np.any(np.diff(u) <= 0) or u.shape != v.shape:
        raise ArgumentError("table flux needs increasing nodes and matching values")
    if u[0] > 0 or u[-1] < 0:
        raise ArgumentError("table flux nodes must bracket 0")
    dv = np.diff(v)
    slopes = dv / np.diff(u)
    cp = np.concatenate([[0.0], np.cumsum(np.maximum(dv, 0.0))])
    cm = np.concatenate([[0.0], np.cumsum(np.minimum(dv, 0.0))])
    v0 = np.interp(0.0, u, v)
    cp0, cm0 = np.interp(0.0, u, cp), np.interp(0.0, u, cm)

    def check(x):
        x = np.asarray(x, dtype=float)
        if np.any(x < u[0] - 1e-12) or np.any(x > u[-1] + 1e-12):
            raise ArgumentError("state outside the flux table range")
        return x

    def a(x):
        x = check(x)
        k = np.clip(np.searchsorted(u, x, side="right") - 1, 0, slopes.size - 1)
        return slopes[k]

    d2 = np.diff(slopes) / (0.5 * (u[2:] - u[:-2])) if u.size > 2 else np.zeros(1)
    convex = bool(np.all(np.diff(slopes) >= -1e-12))
    return Flux(name, lambda x: np.interp(check(x), u, v), a,
                lambda x: np.full_like(np.asarray(x, float), float(np.abs(d2).max())),
                lambda x: v0 + np.interp(check(x), u, cp) - cp0,
                lambda x: np.interp(check(x), u, cm) - cm0, convex, "piecewise linear")


_KEY = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def flux_from_catalog(key: str) -> Flux:
    """Parse ``burgers``, ``cubic`` or ``linear(c)``."""
    m = _KEY.match(key)
    if not m:
        raise ArgumentError(f"malformed flux key {key!r}")
    name, arg = m.group(1), m.group(2)
    if name == "burgers":
        return burgers()
    if name == "cubic":
        return cubic()
    if name == "linear":
        return linear_flux(float(arg) if arg else 1.0)
    raise ArgumentError(f"unknown flux {name!r}")


def reject_semilinear_noise(*_, **__):
    """Multiplicative noise ``Phi(u) dB`` in a conservation law is not supported.

    Its pathwise theory breaks down: shock waves are not preserved under that
    kind of forcing, so no extension from smooth paths exists.
    """
    raise ArgumentError(
        "semilinear noise Phi(u) dB is not supported for conservation laws: "
        "shock waves are not preserved, so the pathwise solution map has no "
        "continuous extension")


# -----------------------------------------------------------------------------
# fields and steps


@dataclass(frozen=True)
class ConservedField:
    """Cell averages on a uniform grid of cells ``[origin + i h, origin + (i+1) h]``."""

    values: np.ndarray
    origin: float
    h: float
    t: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise ArgumentError("need a 1D array of at least three cells")
        if not np.all(np.isfinite(v)):
            raise ArgumentError("cell averages must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, func, a: float, b: float, n: int, periodic: bool = True,
               quadrature: int = 8) -> "ConservedField":
        """Cell averages of ``func`` by Gauss-Legendre quadrature per cell."""
        h = (b - a) / n
        nodes, weights = np.polynomial.legendre.leggauss(quadrature)
        left = a + h * np.arange(n)
        pts = left[:, None] + 0.5 * h * (nodes[None, :] + 1.0)
        vals = np.asarray(func(pts), dtype=float) @ (0.5 * weights)
        return cls(vals, a, h, 0.0, periodic)

    def with_values(self, values, t=None) -> "ConservedField":
        return ConservedField(values, self.origin, self.h, self.t if t is None else t,
                              self.periodic)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.h * (np.arange(self.n) + 0.5)

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.h)

    def norm(self, p: float) -> float:
        if np.isinf(p):
            return float(np.abs(self.values).max())
        return float((np.abs(self.values) ** p).sum() * self.h) ** (1.0 / p)

    @property
    def total_variation(self) -> float:
        v = self.values
        if self.periodic:
            return float(np.abs(np.diff(np.append(v, v[0]))).sum())
        return float(np.abs(np.diff(v)).sum())


def l1_distance(a: ConservedField, b: ConservedField) -> float:
    return float(np.abs(a.values - b.values).sum() * a.h)


def _padded(u: ConservedField):
    v = u.values
    if u.periodic:
        return np.concatenate([v[-1:], v, v[:1]])
    return np.concatenate([v[:1], v, v[-1:]])


def entropy_step(A: Flux, u: ConservedField, dt: float, orientation: int = 1,
                 speed: float | None = None) -> ConservedField:
    """One Engquist-Osher step for ``u_t + orientation * A(u)_x = 0``.

    Refuses steps with ``dt * max|A'| > h``. Non-periodic fields use
    constant ghost cells.
    """
    if orientation not in (1, -1):
        raise ArgumentError("orientation must be +1 or -1")
    if not dt > 0:
        raise ArgumentError("dt must be positive")
    if speed is None:
        speed = A.max_speed(float(u.values.min()), float(u.values.max()))
    if dt * speed > u.h * (1 + 1e-12):
        raise CFLError(f"dt={dt:g} exceeds the hyperbolic CFL limit {u.h / speed:g}")
    w = _padded(u)
    left, right = w[:-1], w[1:]
    if orientation == 1:
        G = A.plus(left) + A.minus(right)
    else:
        G = -(A.minus(left) + A.plus(right))
    return u.with_values(u.values - (dt / u.h) * (G[1:] - G[:-1]), t=u.t + dt)


def pathwise_scl_solve(A: Flux, path: Path, u0: ConservedField, T: float | None = None,
                       record: bool = False):
    """Solve ``du + A(u)_x dB = 0`` along a piecewise-linear scalar path.

    Each path piece with increment ``dB`` becomes ``ceil(|dB| s / (0.9 h))``
    entropy steps in orientation ``sign(dB)``, where ``s`` is the largest
    wave speed on the initial range (the range is invariant).

    Returns
    -------
    ConservedField, or a list of ``(t, B(t), ConservedField)`` after every
    step when ``record`` is true (the first entry is the initial state).
    """
    if path.components != 1:
        raise ArgumentError("conservation laws take a scalar path")
    T = path.horizon if T is None else float(T)
    if T > path.horizon * (1 + 1e-12) or T < 0:
        raise ArgumentError("T must lie in [0, horizon]")
    sub = path.restrict(T) if T < path.horizon else path
    speed = A.max_speed(float(u0.values.min()), float(u0.values.max()))
    u = u0.with_values(u0.values, t=0.0)
    out = [(0.0, 0.0, u)] if record else None
    ts, bs = sub.times, sub.values[:, 0]
    for k in range(ts.size - 1):
        dB = bs[k + 1] - bs[k]
        if dB == 0:
            u = u.with_values(u.values, t=ts[k + 1])
            continue
        n = max(1, int(np.ceil(abs(dB) * speed / (SAFETY * u.h)))) if speed > 0 else 1
        dt = abs(dB) / n
        o = 1 if dB > 0 else -1
        for j in range(n):
            u = entropy_step(A, u, dt, o, speed)
            s = (j + 1) / n
            u = u.with_values(u.values, t=ts[k] + s * (ts[k + 1] - ts[k]))
            if record:
                out.append((u.t, bs[k] + s * dB, u))
    return out if record else u


# -----------------------------------------------------------------------------
# kinetic diagnostics


@dataclass(frozen=True)
class KineticDensity:
    """``chi`` sampled at cell centres ``x`` and ``xi`` nodes, shape ``(len(x), len(xi))``."""

    x: np.ndarray
    xi: np.ndarray
    chi: np.ndarray

    def integrate(self) -> np.ndarray:
        """``int chi dxi`` per cell (rectangle rule on the uniform ``xi`` grid)."""
        return self.chi.sum(axis=1) * (self.xi[1] - self.xi[0])


def _check_xi(u, xi):
    xi = np.asarray(xi, dtype=float)
    if xi.size < 2 or np.any(np.diff(xi) <= 0):
        raise ArgumentError("xi grid must be increasing")
    dxi = xi[1] - xi[0]
    if xi[0] > u.min() + 0.5 * dxi or xi[-1] < u.max() - 0.5 * dxi:
        raise ArgumentError("xi grid does not cover the range of u")
    return xi


def kinetic_density(u: ConservedField, xi) -> KineticDensity:
    """Sample ``chi(u(x), xi)`` on cell centres and ``xi`` nodes."""
    xi = _check_xi(u.values, xi)
    v = u.values[:, None]
    X = xi[None, :]
    chi = np.where((X >= 0) & (X <= v), 1, 0) - np.where((X <= 0) & (X >= v) & (X != 0), 1, 0)
    return KineticDensity(u.x, xi, chi.astype(np.int8))


def _chi_cells(values, edges):
    """Cell-averaged ``chi`` over the ``xi`` cells bounded by ``edges``."""
    lo, hi = edges[:-1][None, :], edges[1:][None, :]
    v = values[:, None]
    pos = np.clip(np.minimum(hi, v) - np.maximum(lo, 0.0), 0.0, None)
    neg = np.clip(np.minimum(hi, 0.0) - np.maximum(lo, v), 0.0, None)
    return (pos - neg) / (hi - lo)


@dataclass(frozen=True)
class DefectEstimate:
    """Defect mass implied by entropy dissipation.

    ``total`` is ``int (u0^2 - u^2) / 2``; ``profile(xi)`` is the defect mass
    ``int int m(x, xi, t) dx dt`` recovered from the change of ``int chi dx``.
    """

    total: float
    xi: np.ndarray
    profile: np.ndarray


def defect_estimate(u0: ConservedField, u: ConservedField, nxi: int = 400) -> DefectEstimate:
    """Defect measure bounds between two states of one run."""
    M = max(np.abs(u0.values).max(), np.abs(u.values).max(), 1e-12)
    edges = np.linspace(-M, M, nxi + 1)
    d = (_chi_cells(u.values, edges) - _chi_cells(u0.values, edges)).sum(axis=0) * u.h
    dxi = edges[1] - edges[0]
    profile = np.cumsum(d) * dxi
    total = 0.5 * float(((u0.values ** 2).sum() - (u.values ** 2).sum()) * u.h)
    return DefectEstimate(total, 0.5 * (edges[:-1] + edges[1:]), profile)


def bump_kernel(radius: float):
    """Smooth compactly supported ``rho0`` with unit mass on ``[-radius, radius]``."""

    def raw(z):
        s = np.asarray(z, dtype=float) / radius
        out = np.zeros_like(s)
        inside = np.abs(s) < 1
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    zz = np.linspace(-radius, radius, 20001)
    mass = np.trapezoid(raw(zz), zz)
    return lambda z: raw(z) / mass


def _transported_average(values, h, edges, a_xi, B, rho0, radius):
    """``Q(y, xi) = int chi(x, xi) rho0(y - x + a(xi) B) dx`` on a periodic grid."""
    chi = _chi_cells(values, edges)
    n = values.size
    shift = a_xi * B
    jlo = int(np.floor((-radius - shift.max()) / h)) - 1
    jhi = int(np.ceil((radius - shift.min()) / h)) + 1
    Q = np.zeros_like(chi)
    for j in range(jlo, jhi + 1):
        w = rho0(j * h + shift) * h
        if not np.any(w):
            continue
        Q += np.roll(chi, j % n, axis=0) * w[None, :]
    return Q


def kinetic_transport_check(A: Flux, trajectory, radius: float = 0.05, nxi: int = 64,
                            stride: int = 1) -> dict:
    """Test the transported kinetic identity along a recorded run.

    For ``S(u) = u^2/2`` and ``S(u) = |u|`` (convex entropies), the averages
    ``E_S(y, t) = int S'(xi) int chi(x, xi, t) rho0(y - x + a(xi) B(t)) dx dxi``
    must be nonincreasing in ``t`` because the defect measure is nonnegative.
    The report gives the largest increase over ``y`` and time (a discretization
    error), the total defect, the defect profile and its bound.

    Parameters
    ----------
    A : Flux
    trajectory : list of (t, B(t), ConservedField)
        As returned by ``pathwise_scl_solve(..., record=True)``; periodic fields.
    radius : float
        Support radius of the bump kernel ``rho0``.
    nxi : int
        Number of ``xi`` cells.
    stride : int
        Use every ``stride``-th recorded state.
    """
    states = trajectory[::stride]
    if states[-1] is not trajectory[-1]:
        states.append(trajectory[-1])
    u0 = states[0][2]
    if not u0.periodic:
        raise ArgumentError("the transport check needs periodic fields")
    M = max(float(np.abs(s[2].values).max()) for s in states)
    edges = np.linspace(-M, M, nxi + 1)
    centres = 0.5 * (edges[:-1] + edges[1:])
    dxi = edges[1] - edges[0]
    a_xi = A.a(centres)
    rho0 = bump_kernel(radius)
    tests = {"quadratic": centres, "abs": np.sign(centres)}
    series = {k: [] for k in tests}
    abs_mass = []
    for _, B, u in states:
        Q = _transported_average(u.values, u.h, edges, a_xi, B, rho0, radius)
        for k, sp in tests.items():
            series[k].append((Q * sp[None, :]).sum(axis=1) * dxi)
        abs_mass.append(u.norm(1))
    increases = {}
    for k, s in series.items():
        E = np.array(s)
        increases[k] = float(max(0.0, np.diff(E, axis=0).max())) if E.shape[0] > 1 else 0.0
    uT = states[-1][2]
    defect = defect_estimate(u0, uT)
    return {
        "max_increase": increases,
        "abs_mass_nonincreasing": bool(np.all(np.diff(abs_mass) <= 1e-12 * max(abs_mass))),
        "defect_total": defect.total,
        "defect_bound": 0.5 * u0.norm(2) ** 2,
        "defect_profile_min": float(defect.profile.min()),
        "defect_profile_max": float(defect.profile.max()),
        "profile_bound": u0.norm(1),
        "h": u0.h,
    }


# -----------------------------------------------------------------------------
# contraction and stability


def contraction_suite(A: Flux, path: Path, pairs, T: float | None = None,
                      path_pairs=None) -> dict:
    """L1 contraction, Lp and TV bounds, and path stability.

    Parameters
    ----------
    A : Flux
    path : Path
        Common path for the pairs in ``pairs``.
    pairs : list of (ConservedField, ConservedField)
        Initial data pairs.
    T : float, optional
    path_pairs : list of (Path, Path), optional
        Path pairs run on the first data pair; reports the measured distance,
        the structural terms of the stability estimate and the implied constant
        ``C = (measured - |du0|_1) / (term_bv + term_sup)``.
    """
    l1_gap, lp_gap, tv_gap = [], {1: [], 2: [], np.inf: []}, []
    for u10, u20 in pairs:
        u1 = pathwise_scl_solve(A, path, u10, T)
        u2 = pathwise_scl_solve(A, path, u20, T)
        l1_gap.append(l1_distance(u1, u2) - l1_distance(u10, u20))
        for p in lp_gap:
            lp_gap[p].append(max(u1.norm(p) - u10.norm(p), u2.norm(p) - u20.norm(p)))
        tv_gap.append(max(u1.total_variation - u10.total_variation,
                          u2.total_variation - u20.total_variation))
    report = {
        "l1_gap": float(max(l1_gap)) if l1_gap else 0.0,
        "lp_gap": {str(p): float(max(v)) for p, v in lp_gap.items()} if l1_gap else {},
        "tv_gap": float(max(tv_gap)) if tv_gap else 0.0,
        "stability": [],
    }
    if path_pairs:
        u10, u20 = pairs[0]
        lo = min(u10.values.min(), u20.values.min())
        hi = max(u10.values.max(), u20.values.max())
        a_norm = A.max_speed(lo, hi)
        da_norm = A.max_curvature(lo, hi)
        for B1, B2 in path_pairs:
            t = B1.horizon if T is None else T
            u1 = pathwise_scl_solve(A, B1, u10, t)
            u2 = pathwise_scl_solve(A, B2, u20, t)
            grid = np.union1d(B1.times, B2.times)
            grid = grid[grid <= t]
            diff = np.interp(grid, B1.times, B1.values[:, 0]) - np.interp(
                grid, B2.times, B2.values[:, 0])
            end = float(abs(B1(t) - B2(t)))
            term_bv = a_norm * (u10.total_variation + u20.total_variation) * end
            term_sup = float(np.sqrt(np.abs(diff).max() * da_norm
                                     * (u10.norm(2) ** 2 + u20.norm(2) ** 2)))
            measured = l1_distance(u1, u2)
            base = l1_distance(u10, u20)
            denom = term_bv + term_sup
            report["stability"].append({
                "measured": measured, "initial": base, "term_bv": term_bv,
                "term_sup": term_sup, "bound_C1": base + denom,
                "implied_C": (measured - base) / denom if denom > 0 else 0.0})
    return report

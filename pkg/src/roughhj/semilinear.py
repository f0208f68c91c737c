"""Semilinear equations ``du = F(D^2u, Du) dt + H(u) dB`` in one space dimension.

The noise is removed by the change of unknown ``u = Phi(v, B(t))`` where
``Phi(., s)`` is the flow of ``d Phi / ds = H(Phi)``. The new unknown solves
the deterministic equation

    v_t = (1 / Phi') F(Phi' v_xx + Phi'' v_x^2, Phi' v_x),

with primes denoting ``v``-derivatives evaluated at ``(v, B(t))``. The path
enters only through lookups of ``B(t)`` into a precomputed flow table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .characteristics import rk4
from .errors import ArgumentError, CFLError, FlowDegeneracyError
from .grid import GridFn
from .paths import Path

SAFETY = 0.9


# -----------------------------------------------------------------------------
# scalar nonlinearities H(u)


@dataclass(frozen=True)
class Nonlinearity:
    """Scalar ``H(u)`` with its first two derivatives."""

    name: str
    f: object
    df: object
    d2f: object
    notes: str = ""

    def __call__(self, u):
        return self.f(np.asarray(u, dtype=float))


def _const(c):
    return lambda u: np.full_like(np.asarray(u, dtype=float), c)


def h_zero() -> Nonlinearity:
    """``H = 0``: no noise, the flow is the identity."""
    return Nonlinearity("zero", _const(0.0), _const(0.0), _const(0.0), "identity flow")


def h_linear(c: float = 1.0) -> Nonlinearity:
    """``H(u) = c u``: the flow is ``v exp(c s)``."""
    return Nonlinearity(f"linear({c:g})", lambda u: c * u, _const(c), _const(0.0),
                        "flow v*exp(c s)")


def h_sin() -> Nonlinearity:
    """``H(u) = sin u``: bounded with bounded derivatives."""
    return Nonlinearity("sin", np.sin, np.cos, lambda u: -np.sin(u), "bounded derivatives")


_KEY = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def nonlinearity_from_catalog(key: str) -> Nonlinearity:
    """Parse ``zero``, ``linear(c)`` or ``sin``."""
    m = _KEY.match(key)
    if not m:
        raise ArgumentError(f"malformed nonlinearity key {key!r}")
    name, arg = m.group(1), m.group(2)
    if name == "zero":
        return h_zero()
    if name == "sin":
        return h_sin()
    if name == "linear":
        return h_linear(float(arg) if arg else 1.0)
    raise ArgumentError(f"unknown nonlinearity {name!r}")


# -----------------------------------------------------------------------------
# second-order operators F(X, p)


@dataclass(frozen=True)
class AffineForms:
    """``F(X, p)`` as one affine form ``a X + b p + c`` or the min/max of several.

    Each ``a`` must be nonnegative (degenerate ellipticity).
    """

    forms: tuple
    combine: str = "single"
    name: str = "F"

    def __post_init__(self):
        if self.combine not in ("single", "min", "max"):
            raise ArgumentError("combine must be 'single', 'min' or 'max'")
        if self.combine == "single" and len(self.forms) != 1:
            raise ArgumentError("a single form needs exactly one (a, b, c) triple")
        if any(a < 0 for a, _, _ in self.forms):
            raise ArgumentError("diffusion coefficients must be nonnegative")

    def _reduce(self, vals):
        if self.combine == "max":
            return np.max(vals, axis=0)
        if self.combine == "min":
            return np.min(vals, axis=0)
        return vals[0]

    def __call__(self, X, p):
        X, p = np.broadcast_arrays(np.asarray(X, float), np.asarray(p, float))
        return self._reduce(np.stack([a * X + b * p + c for a, b, c in self.forms]))

    def structure_quantity(self, X, p):
        """``D_X F X + D_p F p - F`` at the active form (equals ``-c``)."""
        X, p = np.broadcast_arrays(np.asarray(X, float), np.asarray(p, float))
        vals = np.stack([a * X + b * p + c for a, b, c in self.forms])
        k = np.argmax(vals, axis=0) if self.combine == "max" else np.argmin(vals, axis=0)
        cs = np.array([c for _, _, c in self.forms])
        return -cs[k]

    @property
    def max_diffusion(self) -> float:
        return max(a for a, _, _ in self.forms)

    @property
    def max_drift(self) -> float:
        return max(abs(b) for _, b, _ in self.forms)


def f_heat(nu: float) -> AffineForms:
    """``F(X, p) = nu X``."""
    return AffineForms(((float(nu), 0.0, 0.0),), "single", f"heat({nu:g})")


def f_zero() -> AffineForms:
    return AffineForms(((0.0, 0.0, 0.0),), "single", "zero")


def operator_from_catalog(key: str) -> AffineForms:
    """Parse ``heat(nu)``, ``zero``, ``max(a,b,c;a,b,c)`` or ``min(a,b,c;a,b,c)``."""
    key = key.strip()
    m = re.match(r"^(heat|zero|max|min)\s*(?:\((.*)\))?$", key)
    if not m:
        raise ArgumentError(f"unknown operator {key!r}")
    name, arg = m.group(1), m.group(2)
    if name == "zero":
        return f_zero()
    if name == "heat":
        return f_heat(float(arg) if arg else 1.0)
    if not arg:
        raise ArgumentError(f"{name} needs forms, e.g. {name}(0.1,0,0;0.2,0,0)")
    try:
        forms = tuple(tuple(float(v) for v in part.split(",")) for part in arg.split(";"))
    except ValueError as exc:
        raise ArgumentError(f"malformed forms in {key!r}") from exc
    if any(len(f) != 3 for f in forms):
        raise ArgumentError("each form needs three coefficients a,b,c")
    return AffineForms(forms, name, key)


# -----------------------------------------------------------------------------
# flow table


@dataclass(frozen=True)
class FlowTable:
    """``Phi(v, s)`` and its first two ``v``-derivatives on a ``(v, s)`` grid.

    Arrays have shape ``(len(s), len(v))``; ``s`` is increasing and contains 0.
    """

    v: np.ndarray
    s: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    ddphi: np.ndarray
    name: str = ""

    def _bracket(self, s: float):
        if s < self.s[0] - 1e-12 or s > self.s[-1] + 1e-12:
            raise ArgumentError(
                f"flow time {s:g} outside the table range [{self.s[0]:g}, {self.s[-1]:g}]")
        j = int(np.clip(np.searchsorted(self.s, s) - 1, 0, self.s.size - 2))
        w = (s - self.s[j]) / (self.s[j + 1] - self.s[j])
        return j, float(np.clip(w, 0.0, 1.0))

    def _vcell(self, v):
        v = np.asarray(v, dtype=float)
        if np.any(v < self.v[0] - 1e-12) or np.any(v > self.v[-1] + 1e-12):
            raise ArgumentError("value outside the flow table's v range")
        dv = self.v[1] - self.v[0]
        i = np.clip(((v - self.v[0]) / dv).astype(int), 0, self.v.size - 2)
        t = np.clip((v - self.v[i]) / dv, 0.0, 1.0)
        return i, t, dv

    def _row(self, j, v):
        i, t, dv = self._vcell(v)
        f0, f1 = self.phi[j, i], self.phi[j, i + 1]
        d0, d1 = self.dphi[j, i], self.dphi[j, i + 1]
        e0, e1 = self.ddphi[j, i], self.ddphi[j, i + 1]
        t2, t3 = t * t, t * t * t
        h00, h10 = 2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t
        h01, h11 = -2 * t3 + 3 * t2, t3 - t2
        # cubic Hermite for Phi and Phi' (derivatives scaled to the unit cell); linear for Phi''
        phi = h00 * f0 + h10 * d0 * dv + h01 * f1 + h11 * d1 * dv
        dphi = h00 * d0 + h10 * e0 * dv + h01 * d1 + h11 * e1 * dv
        ddphi = (1 - t) * self.ddphi[j, i] + t * self.ddphi[j, i + 1]
        return phi, dphi, ddphi

    def lookup(self, v, s: float):
        """``(Phi, Phi', Phi'')`` at values ``v`` and flow time ``s``."""
        j, w = self._bracket(s)
        a = self._row(j, v)
        if w == 0.0:
            return a
        b = self._row(j + 1, v)
        return tuple((1 - w) * x + w * y for x, y in zip(a, b))

    def __call__(self, v, s: float):
        return self.lookup(v, s)[0]

    def to_rows(self):
        """``(s, v, phi, dphi, ddphi)`` rows for CSV export."""
        S, V = np.meshgrid(self.s, self.v, indexing="ij")
        return np.column_stack([S.ravel(), V.ravel(), self.phi.ravel(),
                                self.dphi.ravel(), self.ddphi.ravel()])


def flow_solve(H: Nonlinearity, v, s_range, step: float = 1e-3) -> FlowTable:
    """Tabulate the flow of ``d Phi/ds = H(Phi)`` with its variational equations.

    ``Phi'`` and ``Phi''`` solve ``dPhi'/ds = H'(Phi) Phi'`` and
    ``dPhi''/ds = H''(Phi) Phi'^2 + H'(Phi) Phi''`` jointly with ``Phi`` by RK4.

    Parameters
    ----------
    H : Nonlinearity
    v : array_like
        Uniform grid of initial values.
    s_range : (float, float)
        Flow times to cover; must contain 0.
    step : float
        RK4 step.

    Raises
    ------
    FlowDegeneracyError
        If ``Phi'`` stops being positive anywhere in the table.
    """
    v = np.asarray(v, dtype=float)
    if v.size < 2 or np.any(np.diff(v) <= 0):
        raise ArgumentError("v grid must be increasing with at least two points")
    lo, hi = float(s_range[0]), float(s_range[1])
    if lo > 0 or hi < 0:
        raise ArgumentError("flow time range must contain 0")
    n = v.size

    def rhs(_, y):
        f, d, e = y[:n], y[n:2 * n], y[2 * n:]
        h1 = H.df(f)
        return np.concatenate([H.f(f), h1 * d, H.d2f(f) * d * d + h1 * e])

    y0 = np.concatenate([v, np.ones(n), np.zeros(n)])
    parts_s, parts_y = [], []
    if lo < 0:
        ts, ys = rk4(lambda t, y: -rhs(t, y), y0, 0.0, -lo, step)
        parts_s.append(-ts[:0:-1])
        parts_y.append(ys[:, :0:-1])
    parts_s.append(np.array([0.0]))
    parts_y.append(y0[:, None])
    if hi > 0:
        ts, ys = rk4(rhs, y0, 0.0, hi, step)
        parts_s.append(ts[1:])
        parts_y.append(ys[:, 1:])
    s = np.concatenate(parts_s)
    ys = np.concatenate(parts_y, axis=1).T
    phi, dphi, ddphi = ys[:, :n], ys[:, n:2 * n], ys[:, 2 * n:]
    phi[s == 0.0] = v
    if np.any(dphi <= 0):
        bad = s[np.any(dphi <= 0, axis=1)]
        raise FlowDegeneracyError(f"flow derivative lost positivity at s={bad[0]:g}")
    return FlowTable(v, s, phi, dphi, ddphi, H.name)


# -----------------------------------------------------------------------------
# transformed problem


@dataclass
class TransformedProblem:
    """The deterministic equation for ``v`` and the structure-condition audit."""

    F: AffineForms
    flow: FlowTable
    audit: dict = field(default_factory=dict)

    def __call__(self, X, p, v, s: float):
        """``(1/Phi') F(Phi' X + Phi'' p^2, Phi' p)`` at flow time ``s``."""
        _, d, e = self.flow.lookup(v, s)
        return self.F(d * X + e * p * p, d * p) / d


def structure_audit(F: AffineForms, box: float = 10.0, samples: int = 201) -> dict:
    """One-sided bound of ``D_X F X + D_p F p - F`` over ``[-box, box]^2``.

    The audit is repeated on a ten times larger box; a bound that does not
    grow with the box is reported as ``box_independent``.
    """

    def side(b):
        g = np.linspace(-b, b, samples)
        X, p = np.meshgrid(g, g, indexing="ij")
        q = F.structure_quantity(X, p)
        return float(q.max()), float(q.min())

    hi, lo = side(box)
    hi10, lo10 = side(10 * box)
    C = min(max(hi, 0.0), max(-lo, 0.0))
    C10 = min(max(hi10, 0.0), max(-lo10, 0.0))
    return {"upper": hi, "lower": lo, "C": C, "C_large_box": C10,
            "box_independent": bool(abs(C10 - C) <= 1e-12 * max(1.0, C))}


def transform(F: AffineForms, flow: FlowTable) -> TransformedProblem:
    """Assemble the transformed operator and audit the structure condition."""
    return TransformedProblem(F, flow, structure_audit(F))


# -----------------------------------------------------------------------------
# solver


def _rhs(F: AffineForms, v, h, d, e):
    up, um = np.roll(v, -1), np.roll(v, 1)
    d2 = (up - 2 * v + um) / (h * h)
    dc = (up - um) / (2 * h)
    dp = (up - v) / h
    dm = (v - um) / h
    r = e / d
    vals = [a * d2 + a * r * dc * dc + max(b, 0.0) * dp + min(b, 0.0) * dm + c / d
            for a, b, c in F.forms]
    return F._reduce(np.stack(vals)), r * dc


def solve_semilinear(F: AffineForms, H: Nonlinearity, path: Path, u0: GridFn, T: float,
                     flow_step: float = 1e-3, v_points: int = 4001, snapshot_times=None,
                     return_diagnostics: bool = False):
    """Solve ``du = F(u_xx, u_x) dt + H(u) dB`` on a periodic 1D grid.

    ``u0`` is mapped through ``Phi(., 0) = id``; ``v`` is advanced by a monotone
    explicit scheme (central diffusion, upwind drift) at the parabolic CFL
    limit times 0.9, and ``u(T) = Phi(v(T), B(T))``.

    Parameters
    ----------
    F, H : operator and noise nonlinearity
    path : Path
        Scalar driving path on ``[0, T]``.
    u0 : GridFn
        Periodic initial data.
    flow_step, v_points : float, int
        Resolution of the flow table.
    snapshot_times : sequence of float, optional
        If given, return a list of ``(t, GridFn)`` instead of the final state.
    return_diagnostics : bool
        Also return a dict with step counts, the minimum monotonicity margin
        and the flow table.

    Raises
    ------
    CFLError
        If the gradient term ever dominates the diffusion (scheme not monotone).
    FlowDegeneracyError
        If the flow loses monotonicity on the required range.
    """
    if u0.dim != 1 or u0.boundary != "periodic":
        raise ArgumentError("the semilinear solver needs 1D periodic data")
    if path.components != 1:
        raise ArgumentError("the semilinear solver takes a scalar path")
    if T > path.horizon * (1 + 1e-12) or not T > 0:
        raise ArgumentError("T must lie in (0, horizon]")
    h = u0.h
    Bvals = path.values[:, 0]
    bmin, bmax = min(0.0, float(Bvals.min())), max(0.0, float(Bvals.max()))
    pad = 0.1 * max(bmax - bmin, 1e-3)
    vmin, vmax = float(u0.values.min()), float(u0.values.max())
    vpad = 0.1 * max(vmax - vmin, 1e-3)
    vg = np.linspace(vmin - vpad, vmax + vpad, v_points)
    flow = flow_solve(H, vg, (bmin - pad, bmax + pad), flow_step)

    rate = 2 * F.max_diffusion / (h * h) + F.max_drift / h
    nsteps = 1 if rate == 0 else int(np.ceil(T * rate / SAFETY))
    dt = T / nsteps
    times = dt * np.arange(nsteps + 1)
    svals = np.interp(times, path.times, Bvals)

    want = sorted(snapshot_times) if snapshot_times is not None else []
    snaps = []
    v = u0.values.astype(float).copy()
    margin = np.inf

    def record(k):
        while want and want[0] <= times[k] + 1e-12:
            tt = want.pop(0)
            snaps.append((tt, u0.with_values(flow(v, svals[k]))))

    record(0)
    for k in range(nsteps):
        _, d, e = flow.lookup(v, svals[k])
        rhs, grad_ratio = _rhs(F, v, h, d, e)
        if F.max_diffusion > 0:
            m = 1.0 - h * float(np.abs(grad_ratio).max())
            margin = min(margin, m)
            if m < 0:
                raise CFLError(f"gradient term dominates diffusion at t={times[k]:g}; refine h")
        v = v + dt * rhs
        record(k + 1)
    out = snaps if snapshot_times is not None else u0.with_values(flow(v, svals[-1]))
    if return_diagnostics:
        return out, {"steps": nsteps, "dt": dt, "monotonicity_margin": margin, "flow": flow}
    return out


def heat_periodic(u0: GridFn, t: float) -> GridFn:
    """Heat semigroup ``exp(t d^2/dx^2)`` applied to the trigonometric interpolant of ``u0``."""
    n = u0.n
    k = 2 * np.pi * np.fft.fftfreq(n, d=u0.h)
    return u0.with_values(np.fft.ifft(np.fft.fft(u0.values) * np.exp(-k * k * t)).real)


def lipschitz_bound_audit(snapshots) -> dict:
    """Gradient bound along a run given as ``[(t, GridFn), ...]``."""
    ts = [float(t) for t, _ in snapshots]
    lips = [float(g.lipschitz()) for _, g in snapshots]
    return {"times": ts, "lipschitz": lips, "C": max(lips),
            "finite": bool(np.all(np.isfinite(lips))),
            "nonincreasing": bool(np.all(np.diff(lips) <= 1e-12 * max(1.0, max(lips))))}

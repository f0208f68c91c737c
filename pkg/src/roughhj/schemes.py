"""Monotone finite-difference schemes for ``du = H(Du) . dB``.

The first-order operator is

    S u(x) = u(x) + sum_i H^i(D_c u(x)) dB_i + (theta / 2) (u(x+h) + u(x-h) - 2 u(x)),

with ``D_c`` the centred difference. It is monotone exactly when
``sum_i |dB_i| L_i <= theta h``. The partition builders choose step sizes so
that an approximating path ``B_h`` satisfies this with a safety factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import ArgumentError, CFLError
from .grid import GridFn
from .hamiltonians import Hamiltonian, SeparableHamiltonian2D
from .paths import (Path, PathEnsembleSpec, component_streams, lipschitz_constant,
                    modulus, sample_path, total_variation)

SAFETY = 0.9


@dataclass
class SchemeConfig:
    """Everything that determines one scheme run.

    Attributes
    ----------
    h : float
        Spatial mesh.
    theta : float
        Viscosity weight in ``(0, 1]``.
    cfl : float
        Target ratio ``lambda = max |dB| / h``.
    partition : ndarray
        Step times, strictly increasing from 0 to ``T``.
    path_h : Path
        Approximating path; increments are read at partition times.
    rho : float
        Nominal step ``rho_h``.
    block : int
        Steps per interpolation block ``M_h``.
    eps : float
        Artificial viscosity ``eps_h`` (second-order operator only).
    dim : int
    hamiltonians : list, optional
        Filled in by :func:`evolve` if absent.
    """

    h: float
    theta: float
    cfl: float
    partition: np.ndarray
    path_h: Path
    rho: float = 0.0
    block: int = 1
    eps: float = 0.0
    dim: int = 1
    hamiltonians: list | None = None

    @property
    def T(self) -> float:
        return float(self.partition[-1])

    def increments(self) -> np.ndarray:
        """Path increments per step, shape ``(steps, m)``."""
        p = self.path_h
        vals = np.stack([np.interp(self.partition, p.times, p.values[:, c])
                         for c in range(p.components)], axis=1)
        return np.diff(vals, axis=0)


@dataclass
class SchemeRun:
    """Result of :func:`evolve`: snapshots plus per-step diagnostics."""

    config: SchemeConfig
    u0: GridFn
    snapshots: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def final(self) -> GridFn:
        return self.snapshots[-1][1]


# -----------------------------------------------------------------------------
# partitions


def _validate_theta(theta):
    if not 0 < theta <= 1:
        raise ArgumentError("theta must lie in (0, 1]")


def _block_partition(path: Path, rho: float, M: int, T: float):
    """Partition ``{n rho}`` grouped into blocks of ``M`` steps.

    A trailing partial block is split into ``M`` equal steps so that its step
    increments never exceed those of a full block.
    """
    blk = M * rho
    nb = int(np.floor(T / blk * (1 + 1e-12)))
    ends = list(np.arange(nb + 1) * blk)
    if T - ends[-1] > 1e-12 * T:
        ends.append(T)
    else:
        ends[-1] = T
    ends = np.asarray(ends)
    steps = [0.0]
    for a, b in zip(ends[:-1], ends[1:]):
        steps.extend(a + (b - a) * np.arange(1, M + 1) / M)
    steps = np.asarray(steps)
    steps[-1] = T
    vals = np.stack([np.interp(ends, path.times, path.values[:, c])
                     for c in range(path.components)], axis=1)
    vals[0] = 0.0
    return steps, Path(ends, vals)


def _max_step_increment(steps, path_h):
    vals = np.stack([np.interp(steps, path_h.times, path_h.values[:, c])
                     for c in range(path_h.components)], axis=1)
    return float(np.abs(np.diff(vals, axis=0)).sum(axis=1).max())


def _finalize(path, rho, h, theta, L, T, lam):
    """Build blocks and shrink ``rho`` until the realized CFL holds."""
    for _ in range(200):
        M = max(1, int(np.floor(rho ** -0.5)))
        steps, path_h = _block_partition(path, rho, M, T)
        inc = _max_step_increment(steps, path_h)
        if inc * L <= theta * h:
            return SchemeConfig(h=h, theta=theta, cfl=lam, partition=steps,
                                path_h=path_h, rho=rho, block=M)
        rho *= 0.9
    raise CFLError(f"no admissible step at h={h:g}; try h={h / 2:g}")


def solve_rho_cts(omega, h: float, theta: float, L: float, T: float,
                  safety: float = SAFETY) -> float:
    """Largest ``rho`` with ``rho^{1/2} omega(rho^{1/2}) <= lambda h``, ``lambda = safety theta / L``."""
    lam = safety * theta / L

    def g(r):
        return np.sqrt(r) * omega(np.sqrt(r)) - lam * h

    if g(T) <= 0:
        return float(T)
    lo, hi = 0.0, float(T)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo


def build_partition_cts(path: Path, h: float, theta: float, L: float,
                        T: float | None = None, safety: float = SAFETY) -> SchemeConfig:
    """Partition for a continuous path from its empirical modulus of continuity.

    ``rho_h`` solves ``rho^{1/2} omega(rho^{1/2}) / h = safety * theta / L``;
    ``B_h`` interpolates the path at multiples of ``M_h rho_h`` with
    ``M_h = floor(rho_h^{-1/2})``.
    """
    _validate_theta(theta)
    T = path.horizon if T is None else T
    omega = modulus(path)
    rho = solve_rho_cts(omega, h, theta, L, T, safety)
    return _finalize(path, rho, h, theta, L, T, safety * theta / L)


def brownian_rho(h: float, theta: float, L: float, safety: float = SAFETY,
                 T: float = 1.0) -> float:
    """Root of ``rho^{3/4} |log rho|^{1/2} = safety theta h / L`` on ``(0, e^{-2/3})``."""
    lam = safety * theta / L
    target = lam * h
    top = min(T, np.exp(-2.0 / 3.0))

    def g(r):
        return r ** 0.75 * np.sqrt(abs(np.log(r))) - target

    if g(top) <= 0:
        return float(top)
    return float(brentq(g, 1e-300, top, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500))


def build_partition_brownian(path: Path, h: float, theta: float, L: float,
                             T: float | None = None, safety: float = SAFETY) -> SchemeConfig:
    """Partition for a Brownian sample with the logarithmically corrected rule."""
    _validate_theta(theta)
    T = path.horizon if T is None else T
    rho = brownian_rho(h, theta, L, safety, T)
    return _finalize(path, rho, h, theta, L, T, safety * theta / L)


def build_random_walk(seed: int, h: float, theta: float, L: float, T: float = 1.0,
                      safety: float = SAFETY) -> SchemeConfig:
    """Scaled simple random walk ``B_h`` with blocks of length ``M_h rho_h``.

    ``rho_h = (lambda h)^{4/3}`` and each block moves by ``+/- (M_h rho_h)^{1/2}``.
    """
    _validate_theta(theta)
    lam = safety * theta / L
    rho = min(T, (lam * h) ** (4.0 / 3.0))
    M = max(1, int(np.floor(rho ** -0.5)))
    blk = M * rho
    nb = int(np.floor(T / blk * (1 + 1e-12)))
    ends = list(np.arange(nb + 1) * blk)
    if T - ends[-1] > 1e-12 * T:
        ends.append(T)
    else:
        ends[-1] = T
    ends = np.asarray(ends)
    lengths = np.diff(ends)
    gen = component_streams(seed, 1)[0]
    signs = np.where(gen.integers(0, 2, size=lengths.size) == 1, 1.0, -1.0)
    vals = np.concatenate([[0.0], np.cumsum(signs * np.sqrt(lengths))])
    path_h = Path(ends, vals)
    steps = [0.0]
    for a, b in zip(ends[:-1], ends[1:]):
        steps.extend(a + (b - a) * np.arange(1, M + 1) / M)
    steps = np.asarray(steps)
    steps[-1] = T
    return SchemeConfig(h=h, theta=theta, cfl=lam, partition=steps, path_h=path_h,
                        rho=rho, block=M)


def build_partition_knots(path: Path, h: float, theta: float, L, T: float | None = None,
                          safety: float = SAFETY) -> SchemeConfig:
    """Partition that keeps a piecewise-linear path exactly (``B_h = path``).

    Each linear piece is split into the fewest equal steps with
    ``sum_i |dB_i| L_i <= safety * theta * h``.
    """
    _validate_theta(theta)
    T = path.horizon if T is None else T
    if T < path.horizon:
        path = path.restrict(T)
    L = np.broadcast_to(np.asarray(L, dtype=float), (path.components,))
    steps = [0.0]
    for k in range(path.times.size - 1):
        a, b = path.times[k], path.times[k + 1]
        inc = float(np.sum(np.abs(path.values[k + 1] - path.values[k]) * L))
        n = max(1, int(np.ceil(inc / (safety * theta * h))))
        steps.extend(a + (b - a) * np.arange(1, n + 1) / n)
    steps = np.asarray(steps)
    steps[-1] = T
    return SchemeConfig(h=h, theta=theta, cfl=safety * theta / float(L.max() or 1.0),
                        partition=steps, path_h=path, rho=float(np.diff(steps).max()), block=1)


# -----------------------------------------------------------------------------
# step operators


def _tag_arrays(hams):
    tags, params, scales = [], [], []
    for H in hams:
        if H.tag is None:
            return None
        tags.append(H.tag)
        params.append(H.param)
        scales.append(H.scale)
    return (np.asarray(tags, dtype=np.int64), np.asarray(params, dtype=float),
            np.asarray(scales, dtype=float))


def _neighbours_1d(u: GridFn, ghost):
    v = u.values
    if u.boundary == "periodic":
        return np.roll(v, -1), np.roll(v, 1)
    sl, sr = ghost
    up = np.append(v[1:], v[-1] + sr * u.h)
    um = np.insert(v[:-1], 0, v[0] - sl * u.h)
    return up, um


def _generic_steps_1d(u: GridFn, dB, hams, theta, ghost):
    vals = u.values.copy()
    h = u.h
    g = u.with_values(vals)
    for k in range(dB.shape[0]):
        up, um = _neighbours_1d(g, ghost)
        p = (up - um) / (2.0 * h)
        acc = vals.copy()
        for c, H in enumerate(hams):
            if dB[k, c] != 0.0:
                acc = acc + H(p) * dB[k, c]
        vals = acc + 0.5 * theta * ((up + um) - 2.0 * vals)
        g = u.with_values(vals)
    return vals


def _check_cfl(dB, Ls, theta, h, where=""):
    need = np.abs(dB) @ np.asarray(Ls, dtype=float)
    worst = int(np.argmax(need)) if need.size else 0
    if need.size and need[worst] > theta * h * (1 + 1e-12):
        raise CFLError(f"CFL violated{where} at step {worst}: sum |dB| L = {need[worst]:.6g} "
                       f"> theta h = {theta * h:.6g}")
    return float(theta * h - (need.max() if need.size else 0.0))


def lipschitz_bounds(hams, u0: GridFn):
    """Per-component ``max |H'|`` on the gradient range of ``u0``."""
    P = u0.lipschitz()
    return [H.slope_bound(P) for H in hams]


def march_1d(u0: GridFn, dB, hams, theta: float, ghost=None) -> GridFn:
    """Apply the first-order operator once per row of ``dB`` (no CFL check)."""
    dB = np.atleast_2d(np.asarray(dB, dtype=float))
    if ghost is None:
        ghost = u0.boundary_slopes()
    periodic = u0.boundary == "periodic"
    tagged = _tag_arrays(hams)
    if tagged is None:
        vals = _generic_steps_1d(u0, dB, hams, theta, ghost)
    else:
        vals = kernels.lf_run_1d(u0.values, dB, u0.h, theta, *tagged, periodic,
                                 float(ghost[0]), float(ghost[1]))
    return u0.with_values(vals)


def lf_step_first_order(u: GridFn, dB, hamiltonians, h: float | None = None,
                        theta: float = 1.0, ghost=None, check: bool = True) -> GridFn:
    """One step of the first-order monotone operator.

    Parameters
    ----------
    u : GridFn
        1D grid function.
    dB : float or sequence
        Increment per path component.
    hamiltonians : Hamiltonian or list
    theta : float
    ghost : (float, float), optional
        Frozen boundary slopes for non-periodic grids; default: those of ``u``.
    check : bool
        Refuse steps violating ``sum_i |dB_i| L_i <= theta h``.
    """
    hams = [hamiltonians] if isinstance(hamiltonians, Hamiltonian) else list(hamiltonians)
    if h is not None and not np.isclose(h, u.h):
        raise ArgumentError("mesh size does not match the grid")
    dB = np.atleast_1d(np.asarray(dB, dtype=float))[None, :]
    if check:
        _check_cfl(dB, lipschitz_bounds(hams, u), theta, u.h)
    return march_1d(u, dB, hams, theta, ghost)


def lf_step_second_order(u: GridFn, dB, dt: float, hamiltonians, F=None, F_lip: float = 0.0,
                         eps: float = 0.0, check: bool = True) -> GridFn:
    """One step of ``u + H(D_c u) dB + [F(D^2 u) + eps D^2 u] dt`` (1D).

    Parameters
    ----------
    F : callable, optional
        Nondecreasing function of the discrete second derivative.
    F_lip : float
        Lipschitz constant of ``F``; steps with ``dt > h^2 / F_lip`` are refused.
    eps : float
        Artificial viscosity ``eps_h``.
    """
    hams = [hamiltonians] if isinstance(hamiltonians, Hamiltonian) else list(hamiltonians)
    h = u.h
    if check and F_lip > 0 and dt > h * h / F_lip * (1 + 1e-12):
        raise CFLError(f"parabolic CFL violated: dt={dt:g} > h^2/|F'| = {h * h / F_lip:g}")
    dB = np.atleast_1d(np.asarray(dB, dtype=float))
    up, um = _neighbours_1d(u, u.boundary_slopes())
    v = u.values
    p = (up - um) / (2.0 * h)
    d2 = ((up + um) - 2.0 * v) / (h * h)
    out = v.copy()
    for H, d in zip(hams, dB):
        if d != 0.0:
            out = out + H(p) * d
    second = eps * d2
    if F is not None:
        second = second + F(d2)
    return u.with_values(out + second * dt)


# -----------------------------------------------------------------------------
# evolution


def _ghost_2d(u0: GridFn):
    return tuple(np.asarray(s, dtype=float) for s in u0.boundary_slopes())


def evolve(cfg: SchemeConfig, u0: GridFn, T: float | None = None, snapshot_times=None,
           hamiltonians=None) -> SchemeRun:
    """Run the first-order scheme along ``cfg.partition`` up to ``T``.

    Snapshots are stored at ``T``, at every block boundary, and at the
    requested times (rounded to the nearest partition time not after them).
    Non-periodic grids use ghost cells whose slopes are frozen at those of
    ``u0``, which keeps every step monotone.
    """
    hams = hamiltonians if hamiltonians is not None else cfg.hamiltonians
    if hams is None:
        raise ArgumentError("no Hamiltonians given")
    if isinstance(hams, (Hamiltonian, SeparableHamiltonian2D)):
        hams = [hams]
    T = cfg.T if T is None else T
    steps = cfg.partition[cfg.partition <= T * (1 + 1e-12)]
    if steps[-1] < T * (1 - 1e-12):
        raise ArgumentError("partition does not reach the requested horizon")
    sub = SchemeConfig(**{**cfg.__dict__, "partition": steps})
    dB = sub.increments()
    if dB.shape[1] != len(hams):
        raise ArgumentError("need one Hamiltonian per path component")
    run = SchemeRun(config=sub, u0=u0)
    if u0.dim == 1:
        Ls = lipschitz_bounds(hams, u0)
        margin = _check_cfl(dB, Ls, cfg.theta, u0.h)
    else:
        P = u0.lipschitz()
        Lx = [H.x_part.slope_bound(P) for H in hams]
        Ly = [H.y_part.slope_bound(P) for H in hams]
        hmin = min(u0.step)
        m1 = _check_cfl(dB, Lx, cfg.theta, 0.5 * hmin, " (x axis)")
        m2 = _check_cfl(dB, Ly, cfg.theta, 0.5 * hmin, " (y axis)")
        margin = min(m1, m2)
    run.diagnostics = {
        "steps": int(dB.shape[0]),
        "max_increment": float(np.abs(dB).max()) if dB.size else 0.0,
        "monotonicity_margin": margin,
        "rho": cfg.rho,
        "block": cfg.block,
    }
    # stopping indices: block boundaries, requested times and the end
    stops = {len(steps) - 1}
    if cfg.block > 1:
        stops.update(range(0, len(steps), cfg.block))
    for s in (snapshot_times or []):
        stops.add(int(np.searchsorted(steps, s, side="right") - 1))
    stops = sorted(i for i in stops if i > 0)
    if snapshot_times and 0.0 in snapshot_times:
        run.snapshots.append((0.0, u0))
    u = u0
    ghost1 = u0.boundary_slopes() if u0.dim == 1 else None
    ghost2 = _ghost_2d(u0) if u0.dim == 2 else None
    prev = 0
    for i in stops:
        chunk = dB[prev:i]
        if u0.dim == 1:
            u = march_1d(u, chunk, hams, cfg.theta, ghost1)
        else:
            u = _march_2d(u, chunk, hams, cfg.theta, ghost2)
        run.snapshots.append((float(steps[i]), u))
        prev = i
    return run


def _march_2d(u: GridFn, dB, hams, theta, ghost):
    for H in hams:
        if H.x_part.tag is None or H.y_part.tag is None:
            raise ArgumentError("2D scheme needs closed-form Hamiltonian parts")
    xt = np.array([H.x_part.tag for H in hams], dtype=np.int64)
    yt = np.array([H.y_part.tag for H in hams], dtype=np.int64)
    xp = np.array([H.x_part.param for H in hams])
    yp = np.array([H.y_part.param for H in hams])
    xs = np.array([H.x_part.scale for H in hams])
    ys = np.array([H.y_part.scale for H in hams])
    vals = kernels.lf_run_2d(u.values, dB, u.step[0], u.step[1], theta, xt, xp, xs,
                             yt, yp, ys, u.boundary == "periodic", ghost)
    return u.with_values(vals)


def solve_with_scheme(hamiltonians, path: Path, u0: GridFn, T: float | None = None,
                      theta: float = 1.0, h: float | None = None) -> GridFn:
    """Scheme fallback for :mod:`roughhj.semigroup`, keeping the path exactly."""
    hams = list(hamiltonians)
    T = path.horizon if T is None else T
    if u0.dim == 1:
        Ls = lipschitz_bounds(hams, u0)
        cfg = build_partition_knots(path, u0.h, theta, Ls, T)
    else:
        P = u0.lipschitz()
        Ls = [2 * max(H.x_part.slope_bound(P), H.y_part.slope_bound(P)) for H in hams]
        cfg = build_partition_knots(path, min(u0.step), theta, Ls, T)
    return evolve(cfg, u0, T, hamiltonians=hams).final


# -----------------------------------------------------------------------------
# consistency and rates


def consistency_probe(hamiltonians, phi_s: GridFn, phi_t: GridFn, dB_steps, dt: float,
                      theta: float = 1.0, interior: float = 0.5) -> float:
    """Largest ``|(S_h phi(s) - phi(t)) / (t - s)|`` over the interior of the grid.

    ``dB_steps`` are the per-step increments across the block ``[s, t]`` and
    ``dt = t - s``. ``interior`` is the fraction of the box kept, centred.
    """
    hams = [hamiltonians] if isinstance(hamiltonians, Hamiltonian) else list(hamiltonians)
    dB = np.asarray(dB_steps, dtype=float).reshape(-1, len(hams))
    out = march_1d(phi_s, dB, hams, theta)
    x = phi_s.x
    c = 0.5 * (x[0] + x[-1])
    mask = np.abs(x - c) <= interior * 0.5 * (x[-1] - x[0])
    return float(np.abs(out.values - phi_t.values)[mask].max() / dt)


def prop61_problem(path: Path, h: float, margin: float = 1.0) -> GridFn:
    """``u0 = |x|`` on a box wide enough for the path's reach."""
    reach = float(np.max(np.abs(path.values)))
    X = 1.0 + margin + 2.0 * reach
    X = h * np.ceil(X / h)
    return GridFn.sample(np.abs, -X, X, h)


def prop61_error(path_true: Path, cfg: SchemeConfig, h: float, window: float = 1.0,
                 theta: float | None = None):
    """Sup error on ``|x| <= window`` of the scheme against the explicit ``|p|``, ``|x|`` solution."""
    from .hamiltonians import abs_h
    from .semigroup import oracle_abs

    u0 = prop61_problem(path_true, h)
    run = evolve(cfg, u0, hamiltonians=[abs_h()])
    x = u0.x
    mask = np.abs(x) <= window
    exact = oracle_abs(path_true, x, cfg.T)
    return float(np.abs(run.final.values - exact)[mask].max())


def fit_slope(hs, errs) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if hs.size < 3:
        raise ArgumentError("need at least three mesh sizes")
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def problem_path(problem: str, seed: int = 0, n: int = 2 ** 14, T: float = 1.0) -> Path:
    """Driving path for a rate-harness problem key."""
    if problem == "lipschitz":
        from .paths import zigzag_path

        return zigzag_path([0.3, 0.55, 0.8, 1.0], [0.3, 0.05, 0.3, 0.1])
    if problem.startswith("hoelder"):
        alpha = float(problem[problem.index("(") + 1:-1]) if "(" in problem else 0.5
        return sample_path(PathEnsembleSpec(seed=seed, T=T, n=n, kind="hoelder",
                                            params={"alpha": alpha}))
    if problem == "brownian":
        return sample_path(PathEnsembleSpec(seed=seed, T=T, n=n, kind="brownian"))
    raise ArgumentError(f"unknown rate problem {problem!r}")


def rate_harness(problem: str, hs, seeds=(0,), theta: float = 1.0, n: int = 2 ** 14):
    """Error table for the ``|p|``, ``|x|`` problem across mesh sizes and seeds.

    Parameters
    ----------
    problem : str
        ``"lipschitz"``, ``"hoelder(alpha)"``, ``"brownian"`` or ``"randomwalk"``.
    hs : sequence of float
        At least three mesh sizes.
    seeds : sequence of int
        Seeds for random problems.

    Returns
    -------
    dict
        ``rows`` (dicts with ``h, seed, rho_h, sup_error, normalized_error``),
        ``slope`` (fit of median error against ``h``) and ``medians``.
    """
    hs = sorted((float(h) for h in hs), reverse=True)
    if len(hs) < 3:
        raise ArgumentError("rate harness needs at least three mesh sizes")
    from .hamiltonians import abs_h

    L = abs_h().lipschitz
    rows = []
    for seed in seeds:
        path = None if problem == "randomwalk" else problem_path(problem, seed, n)
        for h in hs:
            if problem == "randomwalk":
                cfg = build_random_walk(seed, h, theta, L)
                err = prop61_error(cfg.path_h, cfg, h)
            elif problem == "brownian":
                cfg = build_partition_brownian(path, h, theta, L)
                err = prop61_error(path, cfg, h)
            else:
                cfg = build_partition_cts(path, h, theta, L)
                err = prop61_error(path, cfg, h)
            norm = err / (h ** (1 / 3) * abs(np.log(h)) ** (1 / 3))
            rows.append({"h": h, "seed": int(seed), "rho_h": cfg.rho,
                         "sup_error": err, "normalized_error": norm})
    medians = []
    for h in hs:
        errs = [r["sup_error"] for r in rows if r["h"] == h]
        norms = [r["normalized_error"] for r in rows if r["h"] == h]
        medians.append({"h": h, "sup_error": float(np.median(errs)),
                        "normalized_error": float(np.median(norms))})
    slope = fit_slope([m["h"] for m in medians], [m["sup_error"] for m in medians])
    return {"rows": rows, "medians": medians, "slope": slope}


# -----------------------------------------------------------------------------
# nonconvex two-dimensional example


def gassiat_initial(R: float, h: float, D: float, width: float = 0.5) -> GridFn:
    """``|x - y| + Theta(x, y)`` with ``Theta = R`` once ``min(x, y) >= R``.

    ``Theta`` rises linearly from 0 to ``R`` as ``min(x, y)`` goes from
    ``R - width`` to ``R``.
    """
    def f(X, Y):
        ramp = np.clip((np.minimum(X, Y) - (R - width)) / width, 0.0, 1.0)
        return np.abs(X - Y) + R * ramp

    return GridFn.sample2d(f, -D, D, h)


def gassiat_experiment(R: float, path: Path, h: float, T: float | None = None,
                       theta: float = 1.0, width: float = 0.5, margin: float = 1.0) -> dict:
    """Value at the origin for ``du = (|u_x| - |u_y|) dxi`` with the plateau data.

    Uses the two-dimensional first-order scheme with ``B_h = xi``.
    """
    from .hamiltonians import gassiat2d

    T = path.horizon if T is None else T
    tv = total_variation(path, 0.0, T)
    D = h * np.ceil((tv + margin) / h)
    u0 = gassiat_initial(R, h, D, width)
    H = gassiat2d()
    cfg = build_partition_knots(path, h, theta, 2.0, T)
    run = evolve(cfg, u0, T, hamiltonians=[H])
    u = run.final
    i0 = int(round(D / h))
    return {"value": float(u.values[i0, i0]), "total_variation": tv,
            "steps": run.diagnostics["steps"], "h": h, "R": R}

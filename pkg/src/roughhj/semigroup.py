"""Exact pathwise solution operators for spatially homogeneous Hamiltonians.

For a piecewise-linear path the solution of ``du = sum_i H^i(Du) dB_i`` is the
composition, over the linear pieces, of the exact operators of
:func:`roughhj.convex.exact_step`. The checks in this module measure the
cancellation, monotonicity, finite-speed and stability properties of these
compositions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .convex import exact_step
from .errors import ArgumentError, PreconditionError
from .grid import GridFn
from .hamiltonians import Hamiltonian, abs_h
from .paths import (Path, linear_path, reduce_path, running_extrema, sup_distance,
                    total_variation, zigzag_path)


@dataclass
class PathwiseSolveSpec:
    """Problem data for :func:`solve`.

    Attributes
    ----------
    hamiltonians : list of Hamiltonian
        One per path component.
    path : Path
    u0 : GridFn
    T : float, optional
        Horizon; defaults to the path horizon.
    method : {"exact", "scheme"}
    pad : bool
        For non-periodic grids, extend the box by the distance information can
        travel (``max|H'| * TV``) before solving, then crop.
    scheme_options : dict
        Extra keyword arguments for the scheme fallback.
    """

    hamiltonians: list
    path: Path
    u0: GridFn
    T: float | None = None
    method: str = "exact"
    pad: bool = True
    scheme_options: dict = field(default_factory=dict)


def _as_list(hamiltonians):
    if isinstance(hamiltonians, Hamiltonian):
        return [hamiltonians]
    return list(hamiltonians)


def _check_exact(hams):
    for H in hams:
        if not (H.is_convex() or H.is_concave()):
            raise PreconditionError(
                f"exact composition needs convex or concave Hamiltonians; {H.name} is "
                "neither, use method='scheme'")


def apply_increments(hams, u: GridFn, increments) -> GridFn:
    """Exact operator for one linear piece with the given component increments.

    Pieces where every active component moves in the same variational
    direction (all max-plus or all min-plus) compose exactly because the
    corresponding convolutions commute. Mixed directions raise.
    """
    active = [(H, d) for H, d in zip(hams, increments) if d != 0.0]
    if not active:
        return u
    dirs = {int(np.sign(d) * (1 if H.is_convex() else -1)) for H, d in active}
    if len(dirs) > 1:
        raise PreconditionError(
            "components move in opposite variational directions on one piece; "
            "exact composition does not apply, use method='scheme'")
    for H, d in active:
        u = exact_step(H, u, d)
    return u


def _pad_cells(hams, u0: GridFn, path: Path) -> int:
    P = u0.lipschitz()
    reach = sum(H.slope_bound(P) * total_variation(path, component=i)
                for i, H in enumerate(hams))
    return int(np.ceil(reach / u0.h)) + 2


def _padded(u0: GridFn, cells: int) -> GridFn:
    vals = u0.extended(cells)
    return GridFn(vals, u0.origin[0] - cells * u0.h, u0.h, u0.boundary)


def solve_exact(hamiltonians, path: Path, u0: GridFn, T: float | None = None,
                pad: bool = True, snapshots=None):
    """Solution at time ``T`` by composing exact operators along the pieces.

    Parameters
    ----------
    hamiltonians : Hamiltonian or list
    path : Path
    u0 : GridFn
        One-dimensional initial data.
    T : float, optional
    pad : bool
        See :class:`PathwiseSolveSpec`.
    snapshots : sequence of float, optional
        When given, return a list of ``(t, GridFn)`` at these times instead.

    Examples
    --------
    >>> from roughhj.paths import zigzag_path
    >>> u0 = GridFn.sample(np.abs, -3, 3, 0.01)
    >>> u = solve_exact(abs_h(), zigzag_path([0.5, 1.0], [0.5, -0.2]), u0)
    >>> round(float(u(0.0)), 6)
    0.5
    """
    hams = _as_list(hamiltonians)
    if len(hams) != path.components:
        raise ArgumentError("need one Hamiltonian per path component")
    _check_exact(hams)
    T = path.horizon if T is None else T
    if T < path.horizon:
        path = path.restrict(T)
    times = list(path.times)
    snap = sorted(set(float(s) for s in snapshots)) if snapshots is not None else []
    if any(s < 0 or s > T for s in snap):
        raise ArgumentError("snapshot time outside [0, T]")
    grid = np.union1d(path.times, snap) if snap else np.asarray(times)
    vals = np.stack([np.interp(grid, path.times, path.values[:, c])
                     for c in range(path.components)], axis=1)
    cells = 0
    u = u0
    if pad and u0.boundary == "linear":
        cells = _pad_cells(hams, u0, path)
        u = _padded(u0, cells)

    def crop(g):
        if cells == 0:
            return g
        return GridFn(g.values[cells:-cells], u0.origin, u0.step, u0.boundary)

    out = []
    if snap and snap[0] == 0.0:
        out.append((0.0, u0))
    for k in range(grid.size - 1):
        u = apply_increments(hams, u, vals[k + 1] - vals[k])
        if snap and grid[k + 1] in snap:
            out.append((float(grid[k + 1]), crop(u)))
    return out if snapshots is not None else crop(u)


def solve(spec: PathwiseSolveSpec) -> GridFn:
    """Dispatch on ``spec.method``: exact composition or the monotone scheme."""
    if spec.method == "exact":
        return solve_exact(spec.hamiltonians, spec.path, spec.u0, spec.T, spec.pad)
    if spec.method == "scheme":
        from .schemes import solve_with_scheme

        return solve_with_scheme(_as_list(spec.hamiltonians), spec.path, spec.u0,
                                 spec.T, **spec.scheme_options)
    raise ArgumentError(f"unknown method {spec.method!r}")


def oracle_abs(path: Path, x, t: float):
    """Explicit solution for ``H(p) = |p|`` and ``u0(x) = |x|``.

    ``max[(|x| + xi(t))_+, (max_{s <= t} xi(s))_+]``.
    """
    M, _ = running_extrema(path, t)
    xi_t = np.interp(t, path.times, path.values[:, 0])
    return np.maximum(np.maximum(np.abs(x) + xi_t, 0.0), max(M, 0.0))


# -----------------------------------------------------------------------------
# checks


def cancellation_check(H: Hamiltonian, u0: GridFn, a: float):
    """Gaps of the two compositions ``S_H(a) S_{-H}(a)`` and ``S_{-H}(a) S_H(a)``.

    Returns
    -------
    lhs_gap : float
        ``max (S_H(a) S_{-H}(a) u0 - u0)``, expected ``<= 0`` up to grid error.
    rhs_gap : float
        ``min (S_{-H}(a) S_H(a) u0 - u0)``, expected ``>= 0`` up to grid error.
    """
    if not H.is_convex():
        raise PreconditionError("cancellation check needs a convex Hamiltonian")
    if a < 0:
        raise ArgumentError("a must be nonnegative")
    if a == 0:
        return 0.0, 0.0
    # the zigzag paths pad the box, so the second step sees the true intermediate
    down_up = solve_exact(H, zigzag_path([a, 2 * a], [-a, 0.0]), u0)
    up_down = solve_exact(H, zigzag_path([a, 2 * a], [a, 0.0]), u0)
    return (float((down_up.values - u0.values).max()),
            float((up_down.values - u0.values).min()))


def composition_identity_check(H: Hamiltonian, u0: GridFn, a: float, b: float, c: float) -> float:
    """``sup |S_H(c) S_H(-b) S_H(a) u0 - S_H(a + c - b) u0|`` for ``b <= min(a, c)``."""
    if min(a, b, c) < 0:
        raise ArgumentError("durations must be nonnegative")
    if b > min(a, c):
        raise ArgumentError("need b <= min(a, c)")
    knots = [(a, a), (a + b, a - b), (a + b + c, a - b + c)]
    prev, t, v = 0.0, [], []
    for tk, vk in knots:
        if tk > prev:
            t.append(tk)
            v.append(vk)
            prev = tk
    lhs = solve_exact(H, zigzag_path(t, v), u0) if t else u0
    rhs = solve_exact(H, linear_path(1.0, a + c - b), u0) if a + c - b > 0 else u0
    return float(np.abs(lhs.values - rhs.values).max())


def plateau_radius(u: GridFn, value: float, center: float = 0.0, tol: float = 1e-9) -> float:
    """Largest ``r`` such that ``|u - value| <= tol`` at all grid points within ``r`` of ``center``."""
    x = u.x
    d = np.abs(x - center)
    order = np.argsort(d, kind="stable")
    bad = np.abs(u.values[order] - value) > tol
    if not bad.any():
        return float(d.max())
    first = int(np.argmax(bad))
    if first == 0:
        return 0.0
    # the plateau extends at least to the last good point before the first bad one
    return float(d[order][first - 1])


def finite_speed_check(H: Hamiltonian, u0: GridFn, path: Path, t: float, A: float,
                       R: float, center: float = 0.0, tol: float = 1e-9) -> dict:
    """Measured plateau radius at time ``t`` against ``R - L (M(t) - m(t))``.

    ``L`` is the largest ``|H'|`` over the data's gradient range.
    """
    L = H.slope_bound(u0.lipschitz())
    M, m = running_extrema(path, t)
    bound = R - L * (M - m)
    u = solve_exact(H, path, u0, t)
    r = plateau_radius(u, A, center, tol)
    return {"measured": r, "bound": bound, "vacuous": bool(bound <= 0), "L": L}


def path_stability_check(hamiltonians, u01: GridFn, u02: GridFn, path1: Path,
                         path2: Path, t: float) -> dict:
    """Compare ``sup |u1 - u2|`` at time ``t`` with ``C max_i sup|B1_i - B2_i| + sup|u01 - u02|``.

    ``C = m * max_i max_{|p| <= L} |H^i(p)|`` with ``L`` the larger Lipschitz
    constant of the two initial data.
    """
    hams = _as_list(hamiltonians)
    u1 = solve_exact(hams, path1, u01, t)
    u2 = solve_exact(hams, path2, u02, t)
    L = max(u01.lipschitz(), u02.lipschitz())
    C = len(hams) * max(H.sup_on_ball(L) for H in hams)
    p1, p2 = path1.restrict(t) if t < path1.horizon else path1, \
        path2.restrict(t) if t < path2.horizon else path2
    dpath = max(sup_distance(p1, p2, c) for c in range(len(hams)))
    bound = C * dpath + float(np.abs(u01.values - u02.values).max())
    measured = float(np.abs(u1.values - u2.values).max())
    return {"measured": measured, "bound": bound, "C": C, "path_distance": dpath}


def reduced_equivalence_check(H: Hamiltonian, u0: GridFn, path: Path, T: float | None = None) -> float:
    """``sup |S^xi(T) u0 - S^{R(xi)}(T) u0|`` for the reduced path ``R(xi)``."""
    T = path.horizon if T is None else T
    red = reduce_path(path, T)
    a = solve_exact(H, path, u0, T)
    b = solve_exact(H, red, u0, T)
    return float(np.abs(a.values - b.values).max())


def lipschitz_decay_check(H: Hamiltonian, u0: GridFn, path: Path, times) -> list:
    """Measured ``||Du(t)||`` against ``sqrt(2 ||u(t)|| / (theta (M(t) - m(t))))``.

    Requires a uniformly convex ``H`` (``H.uniform_convexity`` set). Times with
    ``M(t) = m(t)`` are reported as skipped.
    """
    theta = H.uniform_convexity
    if not theta:
        raise PreconditionError("Lipschitz decay needs a uniformly convex Hamiltonian")
    times = sorted(float(s) for s in times)
    snaps = dict(solve_exact(H, path, u0, max(times), snapshots=times))
    report = []
    for t in times:
        M, m = running_extrema(path, t)
        u = snaps[t]
        measured = u.lipschitz()
        if M - m <= 0:
            report.append({"t": t, "measured": measured, "bound": np.inf, "skipped": True})
            continue
        bound = float(np.sqrt(2.0 * u.sup() / (theta * (M - m))))
        report.append({"t": t, "measured": measured, "bound": bound, "skipped": False})
    return report


def sandwich_bounds(hamiltonians, u0: GridFn, path: Path, t: float):
    """Lower and upper envelopes from the running extrema of each component.

    With every ``H^i`` convex and shifted to have minimum 0,
    ``prod_i S_{-H^i}(max B_i^-) u0 <= u(t) <= prod_i S_{H^i}(max B_i^+) u0``.
    The shift is undone on return, so the bounds apply to the unnormalized
    solution directly.
    """
    hams = _as_list(hamiltonians)
    lo, hi = u0, u0
    shift = 0.0
    for i, H in enumerate(hams):
        if not H.is_convex():
            raise PreconditionError("sandwich bounds need convex Hamiltonians")
        M, m = running_extrema(path, t, component=i)
        c = H.minimum()
        shift += c * float(np.interp(t, path.times, path.values[:, i]))
        Hn = _shifted(H, -c)
        hi = exact_step(Hn, hi, max(M, 0.0))
        lo = exact_step(Hn, lo, -max(-m, 0.0))
    return lo.with_values(lo.values + shift), hi.with_values(hi.values + shift)


def _shifted(H: Hamiltonian, c: float) -> Hamiltonian:
    if c == 0:
        return H
    from .hamiltonians import table

    P = 1e3
    p = np.linspace(-P, P, 200001)
    return table(p, H(p) + c, name=f"{H.name}{c:+g}")


def longtime_initial(h: float) -> GridFn:
    """2-periodic extension of ``1 - |x - 1|`` on ``[0, 2)``."""
    return GridFn.sample(lambda x: 1.0 - np.abs(x - 1.0), 0.0, 2.0, h, boundary="periodic")


def longtime_experiment(path: Path, h: float = 1 / 256, T: float | None = None,
                        sample_times=None) -> dict:
    """Evolve the periodic tent under ``H(p) = |p|`` and track its range.

    Returns a dict with the trajectory ``(t, max u, min u, osc u)`` at every
    knot (and optional extra sample times) and the final grid function.
    """
    T = path.horizon if T is None else T
    u0 = longtime_initial(h)
    times = sorted(set(np.append(path.times[path.times <= T], T).tolist()
                       + ([] if sample_times is None else list(sample_times))))
    snaps = solve_exact(abs_h(), path, u0, T, snapshots=times)
    traj = [(t, float(g.values.max()), float(g.values.min()),
             float(g.values.max() - g.values.min())) for t, g in snaps]
    return {"trajectory": traj, "final": snaps[-1][1]}

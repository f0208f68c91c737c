"""Piecewise-linear driving signals: construction, sampling, statistics, reduction.

Every path starts at the origin at time zero and is linear between knots, so
maxima, minima and total variation are read off the knots exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError


class Path:
    """Continuous piecewise-linear path with ``m`` components.

    Parameters
    ----------
    times : array_like, shape (n,)
        Strictly increasing knot times, starting at 0.
    values : array_like, shape (n,) or (n, m)
        Knot values; the first row must be zero.
    """

    __slots__ = ("_times", "_values")

    def __init__(self, times, values):
        t = np.array(times, dtype=float)
        v = np.array(values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if t.ndim != 1 or t.size < 2 or v.shape[0] != t.size:
            raise ArgumentError("a path needs at least two knots with matching values")
        if t[0] != 0.0:
            raise ArgumentError("first knot time must be 0")
        if np.any(np.diff(t) <= 0):
            raise ArgumentError("knot times must be strictly increasing")
        if np.any(v[0] != 0.0):
            raise ArgumentError("paths start at the origin")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ArgumentError("knots must be finite")
        t.flags.writeable = False
        v.flags.writeable = False
        self._times = t
        self._values = v

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def values(self) -> np.ndarray:
        """Knot values, shape ``(n, m)``."""
        return self._values

    @property
    def horizon(self) -> float:
        return float(self._times[-1])

    @property
    def components(self) -> int:
        return self._values.shape[1]

    def component(self, i: int) -> "Path":
        return Path(self._times, self._values[:, i])

    def __call__(self, t, component: int = 0):
        return evaluate(self, component, t)

    def __eq__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return (self._times.shape == other._times.shape
                and self._values.shape == other._values.shape
                and bool(np.all(self._times == other._times))
                and bool(np.all(self._values == other._values)))

    def __repr__(self):
        return f"Path(knots={self._times.size}, components={self.components}, T={self.horizon:g})"

    def restrict(self, T: float) -> "Path":
        """The same path on ``[0, T]``, with a knot added at ``T`` if needed."""
        _check_time(self, T)
        if T <= 0:
            raise ArgumentError("restriction horizon must be positive")
        keep = self._times < T
        times = np.append(self._times[keep], T)
        end = np.array([np.interp(T, self._times, self._values[:, c])
                        for c in range(self.components)])
        return Path(times, np.vstack([self._values[keep], end]))


def linear_path(slope, T: float = 1.0) -> Path:
    """Straight path ``t -> slope * t`` on ``[0, T]`` (slope may be a vector)."""
    slope = np.atleast_1d(np.asarray(slope, dtype=float))
    return Path([0.0, T], np.vstack([np.zeros_like(slope), slope * T]))


def zigzag_path(times, values) -> Path:
    """Scalar path through the given knots (a leading ``(0, 0)`` is added if absent)."""
    times = list(map(float, times))
    values = list(map(float, values))
    if not times or times[0] != 0.0:
        times = [0.0] + times
        values = [0.0] + values
    return Path(times, values)


def _check_time(path: Path, t) -> None:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > path.horizon):
        raise ArgumentError(f"time outside [0, {path.horizon}]")


def evaluate(path: Path, component: int, t):
    """Value of a path component at time(s) ``t`` by linear interpolation.

    Examples
    --------
    >>> evaluate(linear_path(1.0), 0, 0.5)
    0.5
    """
    _check_time(path, t)
    out = np.interp(t, path.times, path.values[:, component])
    return float(out) if np.ndim(out) == 0 else out


def _knots_upto(path: Path, t: float, component: int):
    """Knot values on ``[0, t]`` with the value at ``t`` appended."""
    k = np.searchsorted(path.times, t, side="right")
    vals = path.values[:k, component]
    return np.append(vals, np.interp(t, path.times, path.values[:, component]))


def running_extrema(path: Path, t: float, component: int = 0):
    """Running maximum and minimum ``(M(t), m(t))`` over ``[0, t]``."""
    _check_time(path, t)
    vals = _knots_upto(path, t, component)
    return float(vals.max()), float(vals.min())


def running_extrema_series(path: Path, component: int = 0):
    """Running max and min evaluated at every knot."""
    v = path.values[:, component]
    return np.maximum.accumulate(v), np.minimum.accumulate(v)


def total_variation(path: Path, a: float = 0.0, b: float | None = None,
                    component: int = 0) -> float:
    """Total variation of a component over ``[a, b]``.

    Examples
    --------
    >>> total_variation(zigzag_path([1, 2, 3], [1, 0, 1]))
    3.0
    """
    if b is None:
        b = path.horizon
    if not a < b:
        raise ArgumentError("total variation needs a < b")
    _check_time(path, [a, b])
    t = path.times
    inside = (t > a) & (t < b)
    col = path.values[:, component]
    seq = np.concatenate([[np.interp(a, t, col)], col[inside], [np.interp(b, t, col)]])
    return float(np.abs(np.diff(seq)).sum())


def sup_distance(p: Path, q: Path, component: int = 0) -> float:
    """``max_t |p(t) - q(t)|`` over the common horizon (exact on the knot union)."""
    T = min(p.horizon, q.horizon)
    grid = np.union1d(p.times[p.times <= T], q.times[q.times <= T])
    diff = (np.interp(grid, p.times, p.values[:, component])
            - np.interp(grid, q.times, q.values[:, component]))
    return float(np.abs(diff).max())


# --------------------------------------------------------------------------
# reduction to successive extrema


def _last_index(mask) -> int:
    return int(np.flatnonzero(mask)[-1])


def _first_index(mask) -> int:
    return int(np.flatnonzero(mask)[0])


def extrema_sequence(path: Path, T: float | None = None):
    """Knot indices of the alternating successive extrema of a scalar path.

    Returns
    -------
    backward : list of int
        ``tau_0, tau_-1, ...`` down to index 0.
    forward : list of int
        ``tau_0, tau_1, ...`` up to the last knot.
    kinds : dict
        Maps each index to ``+1`` (maximum) or ``-1`` (minimum).

    Notes
    -----
    ``tau_0`` is the latest time at which the global maximum or minimum is
    attained. Forward from there the next point is the latest extremum of the
    opposite kind on the remaining interval, and backward it is the earliest
    extremum of the opposite kind on the initial interval.
    """
    if path.components != 1:
        raise ArgumentError("reduction is defined for scalar paths")
    if T is not None and T < path.horizon:
        path = path.restrict(T)
    v = path.values[:, 0]
    n = v.size
    vmax, vmin = v.max(), v.min()
    kinds = {}
    if vmax == vmin:
        return [0], [n - 1], {0: 0, n - 1: 0}
    imax = _last_index(v == vmax)
    imin = _last_index(v == vmin)
    tau0, kind0 = (imax, 1) if imax > imin else (imin, -1)
    kinds[tau0] = kind0

    forward = [tau0]
    i, kind = tau0, kind0
    while i < n - 1:
        seg = v[i:]
        # after a maximum look for the latest minimum, and vice versa
        target = seg.min() if kind > 0 else seg.max()
        j = i + _last_index(seg == target)
        if j == i:
            # flat remainder: the path is constant on [tau_i, T]
            j = n - 1
        kind = -kind
        kinds.setdefault(j, kind)
        forward.append(j)
        i = j

    backward = [tau0]
    i, kind = tau0, kind0
    while i > 0:
        seg = v[:i + 1]
        target = seg.min() if kind > 0 else seg.max()
        j = _first_index(seg == target)
        if j == i:
            j = 0
        kind = -kind
        kinds.setdefault(j, kind)
        backward.append(j)
        i = j
    return backward, forward, kinds


def reduce_path(path: Path, T: float | None = None) -> Path:
    """Piecewise-linear path through the alternating successive extrema.

    The result agrees with ``path`` at every extremum time and is linear in
    between. A constant path reduces to the two-knot constant path.
    """
    if T is not None and T < path.horizon:
        path = path.restrict(T)
    backward, forward, _ = extrema_sequence(path)
    idx = sorted(set(backward) | set(forward) | {0, path.times.size - 1})
    return Path(path.times[idx], path.values[idx, 0])


def fully_reduce_path(path: Path, T: float | None = None) -> Path:
    """Like :func:`reduce_path` but affine between the last global extremum and ``T``."""
    if T is not None and T < path.horizon:
        path = path.restrict(T)
    backward, _, _ = extrema_sequence(path)
    idx = sorted(set(backward) | {0, path.times.size - 1})
    return Path(path.times[idx], path.values[idx, 0])


# --------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class PathEnsembleSpec:
    """Deterministic recipe for a sampled path.

    Attributes
    ----------
    seed : int
        64-bit seed; only used by random kinds.
    T : float
        Horizon.
    n : int
        Resolution (number of linear pieces).
    kind : str
        ``"brownian"``, ``"sawtooth"``, ``"linear"`` or ``"hoelder"``.
    params : dict
        ``sawtooth``: ``mu`` (slope magnitude); ``linear``: ``slope``;
        ``hoelder``: ``alpha`` and ``construction`` (``"takagi"``);
        ``brownian``: ``components`` (default 1).
    """

    seed: int = 0
    T: float = 1.0
    n: int = 1
    kind: str = "brownian"
    params: dict = field(default_factory=dict)


def component_streams(seed: int, m: int):
    """Independent per-component generators derived from one 64-bit seed.

    Uses PCG64 seeded through ``numpy.random.SeedSequence`` spawning, so each
    component gets its own statistically independent stream.
    """
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF)
    return [np.random.Generator(np.random.PCG64(child)) for child in ss.spawn(m)]


def brownian_increments(seed: int, T: float, n: int, m: int = 1) -> np.ndarray:
    """Gaussian increments with variance ``T / n``, shape ``(n, m)``."""
    scale = np.sqrt(T / n)
    cols = [g.standard_normal(n) * scale for g in component_streams(seed, m)]
    return np.stack(cols, axis=1)


def takagi(t, alpha: float, levels: int) -> np.ndarray:
    """Takagi-Landsberg function ``sum_k 2^(-k alpha) dist(2^k t, Z)``.

    It is ``alpha``-Hoelder for ``0 < alpha < 1`` and Lipschitz-like with a
    logarithmic factor at ``alpha = 1``. Truncated after ``levels`` terms.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k in range(levels):
        s = t * 2.0 ** k
        out += 2.0 ** (-k * alpha) * np.abs(s - np.round(s))
    return out


def sample_path(spec: PathEnsembleSpec) -> Path:
    """Materialize a :class:`PathEnsembleSpec` as a :class:`Path`."""
    if spec.n < 1:
        raise ArgumentError("resolution n must be at least 1")
    if not spec.T > 0:
        raise ArgumentError("horizon must be positive")
    kind = spec.kind
    T, n = float(spec.T), int(spec.n)
    t = np.linspace(0.0, T, n + 1)
    if kind == "linear":
        slope = float(spec.params.get("slope", 1.0))
        return Path([0.0, T], [0.0, slope * T])
    if kind == "sawtooth":
        mu = float(spec.params.get("mu", 1.0))
        signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        vals = np.concatenate([[0.0], np.cumsum(signs * mu * T / n)])
        return Path(t, vals)
    if kind == "hoelder":
        alpha = float(spec.params.get("alpha", 0.5))
        construction = spec.params.get("construction", "takagi")
        if construction != "takagi":
            raise ArgumentError(f"unknown Hoelder construction {construction!r}")
        levels = max(1, int(np.ceil(np.log2(n))))
        vals = takagi(t / T, alpha, levels) * T ** alpha
        return Path(t, vals)
    if kind == "brownian":
        m = int(spec.params.get("components", 1))
        inc = brownian_increments(spec.seed, T, n, m)
        vals = np.vstack([np.zeros((1, m)), np.cumsum(inc, axis=0)])
        return Path(t, vals)
    raise ArgumentError(f"unknown path kind {kind!r}")


# --------------------------------------------------------------------------
# approximation and modulus of continuity


def interpolate(path: Path, delta: float) -> Path:
    """Linear interpolation of ``path`` at multiples of ``delta`` (plus ``T``)."""
    T = path.horizon
    if not delta > 0:
        raise ArgumentError("interpolation step must be positive")
    if delta > T * (1 + 1e-12):
        raise ArgumentError("interpolation step exceeds the horizon")
    k = int(np.floor(T / delta + 1e-9))
    times = np.arange(k + 1) * delta
    times = times[times < T - 1e-12 * T]
    times = np.append(times, T)
    vals = np.stack([np.interp(times, path.times, path.values[:, c])
                     for c in range(path.components)], axis=1)
    vals[0] = 0.0
    return Path(times, vals)


def mollify(path: Path, eps: float, resolution: int | None = None) -> Path:
    """Convolution with a rescaled Epanechnikov kernel of half-width ``eps``.

    The path is extended by its end values outside ``[0, T]``, smoothed on a
    uniform grid and shifted so that it starts at 0 again.
    """
    if not eps > 0:
        raise ArgumentError("mollification width must be positive")
    T = path.horizon
    dt_knots = float(np.diff(path.times).min())
    dt = min(dt_knots, eps / 8.0)
    if resolution is not None:
        dt = T / resolution
    n = int(np.ceil(T / dt))
    dt = T / n
    half = max(1, int(np.ceil(eps / dt)))
    s = np.arange(-half, half + 1) * dt / eps
    kernel = np.clip(1.0 - s * s, 0.0, None)
    kernel /= kernel.sum()
    grid = np.linspace(0.0, T, n + 1)
    cols = []
    for c in range(path.components):
        vals = np.interp(grid, path.times, path.values[:, c])
        padded = np.concatenate([np.full(half, vals[0]), vals, np.full(half, vals[-1])])
        smooth = np.convolve(padded, kernel, mode="valid")
        cols.append(smooth - smooth[0])
    return Path(grid, np.stack(cols, axis=1))


def approximate(path: Path, method: str, param: float) -> Path:
    """Dispatch to :func:`mollify` (``"mollify"``) or :func:`interpolate` (``"interpolate"``)."""
    if method == "mollify":
        return mollify(path, param)
    if method == "interpolate":
        return interpolate(path, param)
    raise ArgumentError(f"unknown approximation method {method!r}")


def oscillation(path: Path, r: float, component: int = 0, resolution: int | None = None) -> float:
    """Largest ``max - min`` of the path over windows of length ``r``.

    Evaluated on a uniform resampling that contains all knots when they lie
    on a uniform grid.
    """
    from scipy.ndimage import maximum_filter1d, minimum_filter1d

    T = path.horizon
    if r >= T:
        col = path.values[:, component]
        return float(col.max() - col.min())
    if resolution is None:
        resolution = max(1024, 4 * path.times.size)
    grid = np.linspace(0.0, T, resolution + 1)
    vals = np.interp(grid, path.times, path.values[:, component])
    w = max(2, int(np.floor(r / (T / resolution))) + 1)
    hi = maximum_filter1d(vals, w, origin=-(w // 2))
    lo = minimum_filter1d(vals, w, origin=-(w // 2))
    return float((hi - lo)[: vals.size - w + 1].max())


def lipschitz_constant(path: Path, component: int = 0) -> float:
    """Largest absolute slope over the linear pieces."""
    return float(np.max(np.abs(np.diff(path.values[:, component]) / np.diff(path.times))))


def modulus(path: Path, component: int = 0):
    """Empirical modulus of continuity ``omega(r)`` as a callable.

    The oscillation is measured at dyadic window lengths and upper-enveloped:
    ``omega(r)`` returns the value at the smallest dyadic length ``>= r``.
    The Lipschitz bound ``K r`` is used whenever it is smaller.
    """
    T = path.horizon
    K = lipschitz_constant(path, component)
    resolution = max(1024, 4 * path.times.size)
    dt = T / resolution
    lags = [dt * 2.0 ** j for j in range(int(np.ceil(np.log2(resolution))) + 1)]
    osc = np.maximum.accumulate([oscillation(path, r, component, resolution) for r in lags])
    lags = np.array(lags)

    def omega(r):
        r = float(r)
        if r <= 0:
            return 0.0
        j = int(np.searchsorted(lags, r * (1 - 1e-12)))
        env = osc[min(j, osc.size - 1)]
        return float(min(K * r, env))

    return omega


# --------------------------------------------------------------------------
# CSV


def write_path_csv(path: Path, fname) -> None:
    """Write knots as CSV with header ``t,v1[,v2,...]`` (round-trip precision)."""
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"v{i + 1}" for i in range(path.components)])
        for t, row in zip(path.times, path.values):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in row])


def read_path_csv(fname) -> Path:
    """Inverse of :func:`write_path_csv`."""
    with open(fname, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], [r for r in rows[1:] if r]
    if not header or header[0].strip() != "t":
        raise ArgumentError("path CSV must start with a 't' column")
    data = np.array([[float(x) for x in r] for r in body])
    return Path(data[:, 0], data[:, 1:])


def path_stats(path: Path) -> dict:
    """Summary statistics per component."""
    out = {"T": path.horizon, "knots": int(path.times.size), "components": []}
    for c in range(path.components):
        col = path.values[:, c]
        out["components"].append({
            "max": float(col.max()),
            "min": float(col.min()),
            "end": float(col[-1]),
            "total_variation": total_variation(path, component=c),
        })
    return out

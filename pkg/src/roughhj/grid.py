"""Uniform-grid functions in one and two space dimensions."""

from __future__ import annotations

import csv

import numpy as np

from .errors import ArgumentError

BOUNDARIES = ("periodic", "linear")


class GridFn:
    """Scalar function sampled on a uniform grid.

    Parameters
    ----------
    values : array_like
        Samples, 1D or 2D.
    origin : float or tuple
        Coordinate of the first sample along each axis.
    step : float or tuple
        Mesh size per axis.
    boundary : {"periodic", "linear"}
        ``"periodic"`` wraps with period ``n * step``; ``"linear"`` extends
        beyond the box with the one-sided boundary slope.
    """

    __slots__ = ("values", "origin", "step", "boundary")

    def __init__(self, values, origin=0.0, step=1.0, boundary="linear"):
        v = np.array(values, dtype=float)
        if v.ndim not in (1, 2):
            raise ArgumentError("grid functions are 1D or 2D")
        origin = tuple(np.broadcast_to(np.asarray(origin, dtype=float), (v.ndim,)).tolist())
        step = tuple(np.broadcast_to(np.asarray(step, dtype=float), (v.ndim,)).tolist())
        if any(s <= 0 for s in step):
            raise ArgumentError("grid step must be positive")
        if any(n < 2 for n in v.shape):
            raise ArgumentError("need at least two samples per axis")
        if boundary not in BOUNDARIES:
            raise ArgumentError(f"boundary must be one of {BOUNDARIES}")
        v.flags.writeable = False
        self.values = v
        self.origin = origin
        self.step = step
        self.boundary = boundary

    # -- construction -----------------------------------------------------
    @classmethod
    def sample(cls, func, a: float, b: float, h: float, boundary="linear") -> "GridFn":
        """Sample ``func`` on ``[a, b]`` (periodic grids exclude ``b``)."""
        n = int(round((b - a) / h))
        if boundary == "linear":
            n += 1
        x = a + h * np.arange(n)
        return cls(func(x), a, h, boundary)

    @classmethod
    def sample2d(cls, func, a: float, b: float, h: float, boundary="linear") -> "GridFn":
        """Sample ``func(x, y)`` on the square ``[a, b]^2`` with ``indexing='ij'``."""
        n = int(round((b - a) / h)) + (1 if boundary == "linear" else 0)
        x = a + h * np.arange(n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        return cls(func(X, Y), (a, a), (h, h), boundary)

    def with_values(self, values) -> "GridFn":
        return GridFn(values, self.origin, self.step, self.boundary)

    # -- geometry -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def h(self) -> float:
        return self.step[0]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def axis(self, k: int = 0) -> np.ndarray:
        return self.origin[k] + self.step[k] * np.arange(self.values.shape[k])

    @property
    def x(self) -> np.ndarray:
        return self.axis(0)

    def mesh(self):
        return np.meshgrid(self.axis(0), self.axis(1), indexing="ij")

    @property
    def period(self) -> float:
        return self.n * self.h

    # -- analysis -----------------------------------------------------------
    def boundary_slopes(self):
        """One-sided slopes at the two ends of each axis (1D: a pair)."""
        v, h = self.values, self.step
        if self.dim == 1:
            return (v[1] - v[0]) / h[0], (v[-1] - v[-2]) / h[0]
        return ((v[1, :] - v[0, :]) / h[0], (v[-1, :] - v[-2, :]) / h[0],
                (v[:, 1] - v[:, 0]) / h[1], (v[:, -1] - v[:, -2]) / h[1])

    def differences(self) -> np.ndarray:
        """Forward differences divided by ``h`` (1D), including the wrap when periodic."""
        v = self.values
        if self.boundary == "periodic":
            return (np.roll(v, -1) - v) / self.h
        return np.diff(v) / self.h

    def lipschitz(self) -> float:
        """Largest absolute discrete slope along any axis."""
        if self.dim == 1:
            return float(np.abs(self.differences()).max())
        v = self.values
        if self.boundary == "periodic":
            dx = np.roll(v, -1, 0) - v
            dy = np.roll(v, -1, 1) - v
        else:
            dx, dy = np.diff(v, axis=0), np.diff(v, axis=1)
        return float(max(np.abs(dx).max() / self.step[0], np.abs(dy).max() / self.step[1]))

    def sup(self) -> float:
        return float(np.abs(self.values).max())

    def extended(self, left: int, right: int | None = None) -> np.ndarray:
        """1D samples padded by ``left``/``right`` cells using the boundary rule."""
        if self.dim != 1:
            raise ArgumentError("extension is implemented for 1D grids")
        if right is None:
            right = left
        v = self.values
        if self.boundary == "periodic":
            idx = np.arange(-left, v.size + right)
            return v[idx % v.size]
        sl, sr = self.boundary_slopes()
        lo = v[0] - sl * self.h * np.arange(left, 0, -1)
        hi = v[-1] + sr * self.h * np.arange(1, right + 1)
        return np.concatenate([lo, v, hi])

    def __call__(self, x):
        """Linear interpolation at arbitrary points (1D), honouring the boundary rule."""
        if self.dim != 1:
            raise ArgumentError("point evaluation is implemented for 1D grids")
        x = np.asarray(x, dtype=float)
        xs, v = self.x, self.values
        if self.boundary == "periodic":
            L = self.period
            xr = self.origin[0] + np.mod(x - self.origin[0], L)
            return np.interp(xr, np.append(xs, xs[0] + L), np.append(v, v[0]))
        sl, sr = self.boundary_slopes()
        out = np.interp(x, xs, v)
        out = np.where(x < xs[0], v[0] + sl * (x - xs[0]), out)
        return np.where(x > xs[-1], v[-1] + sr * (x - xs[-1]), out)

    def __repr__(self):
        return (f"GridFn(shape={self.values.shape}, origin={self.origin}, "
                f"step={self.step}, boundary={self.boundary!r})")


def sup_diff(a: GridFn, b: GridFn, mask=None) -> float:
    """Sup-norm of ``a - b`` (optionally restricted by a boolean mask)."""
    d = np.abs(a.values - b.values)
    if mask is not None:
        d = d[mask]
    return float(d.max())


def write_grid_csv(g: GridFn, fname) -> None:
    """Write ``x,v`` (1D) or ``x,y,v`` (2D) rows with round-trip precision."""
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        if g.dim == 1:
            w.writerow(["x", "v"])
            for x, v in zip(g.x, g.values):
                w.writerow([repr(float(x)), repr(float(v))])
        else:
            w.writerow(["x", "y", "v"])
            X, Y = g.mesh()
            for x, y, v in zip(X.ravel(), Y.ravel(), g.values.ravel()):
                w.writerow([repr(float(x)), repr(float(y)), repr(float(v))])


def read_grid_csv(fname, boundary="linear") -> GridFn:
    """Inverse of :func:`write_grid_csv`; the grid must be uniform."""
    with open(fname, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = [c.strip() for c in rows[0]]
    data = np.array([[float(c) for c in r] for r in rows[1:]])
    if header == ["x", "v"]:
        x = data[:, 0]
        h = np.diff(x)
        if not np.allclose(h, h[0], rtol=1e-9, atol=0):
            raise ArgumentError("grid CSV is not uniform")
        return GridFn(data[:, 1], x[0], h[0], boundary)
    if header == ["x", "y", "v"]:
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        vals = data[:, 2].reshape(xs.size, ys.size)
        return GridFn(vals, (xs[0], ys[0]), (xs[1] - xs[0], ys[1] - ys[0]), boundary)
    raise ArgumentError("grid CSV header must be 'x,v' or 'x,y,v'")

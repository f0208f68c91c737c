"""Spatially homogeneous Hamiltonians with the metadata the solvers rely on."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ArgumentError, PreconditionError

_SAT_MAX_SLOPE = 9.0 / (16.0 * np.sqrt(3.0))  # max of p / (1 + p^2)^2


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Descriptor of a scalar Hamiltonian ``H(p)``, ``p`` real.

    The value is ``scale * base(p)``, where ``base`` is either a closed form
    selected by ``tag`` or linear interpolation of a table.

    Attributes
    ----------
    name : str
        Catalog key used for display and serialization.
    tag : int or None
        Kernel tag (see :mod:`roughhj.kernels`); ``None`` for tables.
    param : float
        Shape parameter of the closed form (``a`` or ``theta``).
    scale : float
        Multiplicative factor, negative for reflected Hamiltonians.
    curvature : int
        ``+1`` convex, ``-1`` concave, ``0`` neither.
    lipschitz : float
        Global Lipschitz constant (``inf`` when unbounded).
    uniform_convexity : float or None
        Lower bound on ``H''`` when uniformly convex.
    difference_of_convex : bool
        Whether ``H`` is a difference of two convex functions.
    notes : str
        Free-form metadata shown by the catalog listing.
    """

    name: str
    tag: int | None
    param: float = 0.0
    scale: float = 1.0
    curvature: int = 0
    lipschitz: float = np.inf
    uniform_convexity: float | None = None
    difference_of_convex: bool = True
    notes: str = ""
    table_p: np.ndarray | None = field(default=None, repr=False)
    table_v: np.ndarray | None = field(default=None, repr=False)

    # -- evaluation -----------------------------------------------------------
    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if self.tag is None:
            return self.scale * _interp_linear(p, self.table_p, self.table_v)
        return self.scale * kernels.eval_tagged(self.tag, self.param, p)

    def derivative(self, p):
        """``H'(p)``; one-sided choices at kinks (0 for ``|p|`` at the origin)."""
        p = np.asarray(p, dtype=float)
        s = self.scale
        if self.tag == kernels.TAG_ABS:
            return s * np.sign(p)
        if self.tag == kernels.TAG_QUADRATIC:
            return s * self.param * p
        if self.tag == kernels.TAG_POWER:
            with np.errstate(divide="ignore", invalid="ignore"):
                d = self.param * np.abs(p) ** (self.param - 1.0) * np.sign(p)
            return s * np.where(p == 0, 0.0, d)
        if self.tag == kernels.TAG_SATURATED:
            return s * p / (1.0 + p * p) ** 2
        if self.tag == kernels.TAG_ZERO:
            return np.zeros_like(p)
        slopes = np.diff(self.table_v) / np.diff(self.table_p)
        k = np.clip(np.searchsorted(self.table_p, p, side="right") - 1, 0, slopes.size - 1)
        return s * slopes[k]

    def second_derivative(self, p):
        """``H''(p)`` for closed forms (zero for piecewise-linear tables)."""
        p = np.asarray(p, dtype=float)
        s = self.scale
        if self.tag == kernels.TAG_QUADRATIC:
            return s * self.param * np.ones_like(p)
        if self.tag == kernels.TAG_SATURATED:
            q = p * p
            return s * (1.0 - 3.0 * q) / (1.0 + q) ** 3
        if self.tag == kernels.TAG_POWER:
            th = self.param
            with np.errstate(divide="ignore", invalid="ignore"):
                d = th * (th - 1.0) * np.abs(p) ** (th - 2.0)
            return s * np.where(p == 0, 0.0 if th >= 2 else np.inf, d)
        return np.zeros_like(p)

    def __neg__(self) -> "Hamiltonian":
        return replace(self, scale=-self.scale, curvature=-self.curvature,
                       name=_negated_name(self.name))

    def scaled(self, c: float) -> "Hamiltonian":
        """``c * H``; the curvature flag flips for negative ``c``."""
        if c == 0:
            return zero()
        curv = self.curvature if c > 0 else -self.curvature
        return replace(self, scale=self.scale * c, curvature=curv,
                       name=f"{c:g}*{self.name}")

    # -- bounds -----------------------------------------------------------------
    def slope_bound(self, pmax: float) -> float:
        """``max |H'(p)|`` over ``|p| <= pmax``."""
        s = abs(self.scale)
        pmax = float(pmax)
        if self.tag == kernels.TAG_ABS:
            return s
        if self.tag == kernels.TAG_QUADRATIC:
            return s * self.param * pmax
        if self.tag == kernels.TAG_POWER:
            th = self.param
            if th < 1:
                return np.inf
            return s * th * pmax ** (th - 1.0) if pmax > 0 else (s if th == 1 else 0.0)
        if self.tag == kernels.TAG_SATURATED:
            if pmax >= 1.0 / np.sqrt(3.0):
                return s * _SAT_MAX_SLOPE
            return s * pmax / (1.0 + pmax * pmax) ** 2
        if self.tag == kernels.TAG_ZERO:
            return 0.0
        tp = self.table_p
        slopes = np.abs(np.diff(self.table_v) / np.diff(tp))
        lo = max(0, np.searchsorted(tp, -pmax, side="right") - 1)
        hi = min(slopes.size, np.searchsorted(tp, pmax, side="left") + 1)
        return s * float(slopes[lo:hi].max())

    def sup_on_ball(self, pmax: float) -> float:
        """``max |H(p)|`` over ``|p| <= pmax`` (sampled, exact for monotone-in-|p| forms)."""
        p = np.linspace(-pmax, pmax, 2001)
        return float(np.abs(self(p)).max())

    def minimum(self, pmax: float = 1e3) -> float:
        """Minimum value (closed forms exactly, tables on their grid)."""
        if self.tag in (kernels.TAG_ABS, kernels.TAG_QUADRATIC, kernels.TAG_POWER,
                        kernels.TAG_SATURATED, kernels.TAG_ZERO):
            if self.scale >= 0:
                return 0.0
            return self.scale * _base_sup(self, pmax)
        return float(np.min(self(self.table_p)))

    # -- convex duality -----------------------------------------------------------
    def conjugate(self, q, pmax: float):
        """Legendre transform of ``H`` restricted to ``|p| <= pmax``.

        ``sup_{|p| <= pmax} (q p - H(p))``; requires a convex ``H``.
        """
        if self.curvature < 0 or (self.curvature == 0 and self.tag != kernels.TAG_ZERO):
            raise PreconditionError(f"{self.name} is not convex")
        q = np.asarray(q, dtype=float)
        P = float(pmax)
        if self.tag == kernels.TAG_ABS:
            return P * np.maximum(np.abs(q) - self.scale, 0.0)
        if self.tag == kernels.TAG_QUADRATIC:
            c = self.scale * self.param
            if c == 0:
                return P * np.abs(q)
            qc = np.clip(q, -c * P, c * P)
            return np.where(np.abs(q) <= c * P, qc * qc / (2.0 * c),
                            P * np.abs(q) - 0.5 * c * P * P)
        if self.tag == kernels.TAG_ZERO:
            return P * np.abs(q)
        return _numeric_conjugate(self, q, P)

    def is_convex(self) -> bool:
        return self.curvature > 0 or self.tag == kernels.TAG_ZERO

    def is_concave(self) -> bool:
        return self.curvature < 0 or self.tag == kernels.TAG_ZERO

    def describe(self) -> dict:
        return {
            "name": self.name,
            "convex": self.is_convex(),
            "concave": self.is_concave(),
            "lipschitz": self.lipschitz,
            "uniform_convexity": self.uniform_convexity,
            "difference_of_convex": self.difference_of_convex,
            "notes": self.notes,
        }


def _negated_name(name: str) -> str:
    return name[1:] if name.startswith("-") else "-" + name


def _base_sup(H: Hamiltonian, pmax: float) -> float:
    p = np.linspace(-pmax, pmax, 4001)
    return float(np.max(kernels.eval_tagged(H.tag, H.param, p)))


def _interp_linear(p, xs, ys):
    out = np.interp(p, xs, ys)
    sl = (ys[1] - ys[0]) / (xs[1] - xs[0])
    sr = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    out = np.where(p < xs[0], ys[0] + sl * (p - xs[0]), out)
    return np.where(p > xs[-1], ys[-1] + sr * (p - xs[-1]), out)


def _numeric_conjugate(H: Hamiltonian, q, P: float, npts: int = 4001):
    p = np.linspace(-P, P, npts)
    if H.tag is None:
        inside = H.table_p[(H.table_p > -P) & (H.table_p < P)]
        p = np.union1d(p, inside)
    hp = H(p)
    flat = q.ravel()
    out = np.empty_like(flat)
    chunk = max(1, 2_000_000 // p.size)
    for i in range(0, flat.size, chunk):
        qq = flat[i:i + chunk, None]
        out[i:i + chunk] = np.max(qq * p[None, :] - hp[None, :], axis=1)
    return out.reshape(q.shape)


# -----------------------------------------------------------------------------
# catalog constructors


def abs_h() -> Hamiltonian:
    """``H(p) = |p|``: convex, Lipschitz constant 1."""
    return Hamiltonian("abs", kernels.TAG_ABS, curvature=1, lipschitz=1.0,
                       notes="convex, L=1")


def quadratic(a: float = 1.0) -> Hamiltonian:
    """``H(p) = a p^2 / 2``: uniformly convex with constant ``a``."""
    if a <= 0:
        raise ArgumentError("quadratic coefficient must be positive")
    return Hamiltonian(f"quadratic({a:g})", kernels.TAG_QUADRATIC, param=float(a),
                       curvature=1, lipschitz=np.inf, uniform_convexity=float(a),
                       notes="uniformly convex, locally Lipschitz")


def power(theta: float) -> Hamiltonian:
    """``H(p) = |p|^theta``."""
    if theta <= 0:
        raise ArgumentError("exponent must be positive")
    convex = theta >= 1
    dc = theta >= 0.5
    notes = "convex" if convex else "nonconvex"
    if not dc:
        notes += ", not difference of convex (exponent below 1/2)"
    return Hamiltonian(f"power({theta:g})", kernels.TAG_POWER, param=float(theta),
                       curvature=1 if convex else 0,
                       lipschitz=1.0 if theta == 1 else np.inf,
                       difference_of_convex=dc, notes=notes)


def saturated() -> Hamiltonian:
    """``H(p) = p^2 / (2 (1 + p^2))``: bounded with bounded derivatives."""
    return Hamiltonian("saturated", kernels.TAG_SATURATED, curvature=0,
                       lipschitz=float(_SAT_MAX_SLOPE),
                       notes="bounded, convex only for |p| < 1/sqrt(3)")


def zero() -> Hamiltonian:
    return Hamiltonian("zero", kernels.TAG_ZERO, curvature=1, lipschitz=0.0, notes="H = 0")


def table(p, values, name: str = "table") -> Hamiltonian:
    """Hamiltonian given by samples, linear in between and extrapolated linearly."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(values, dtype=float)
    if p.ndim != 1 or p.size < 2 or p.shape != v.shape or np.any(np.diff(p) <= 0):
        raise ArgumentError("table needs increasing p samples with matching values")
    d2 = np.diff(np.diff(v) / np.diff(p))
    tol = 1e-8 * max(1.0, float(np.abs(v).max()))
    curv = 1 if np.all(d2 >= -tol) else (-1 if np.all(d2 <= tol) else 0)
    L = float(np.abs(np.diff(v) / np.diff(p)).max())
    return Hamiltonian(name, None, curvature=curv, lipschitz=L, table_p=p, table_v=v,
                       notes="tabulated")


@dataclass(frozen=True)
class SeparableHamiltonian2D:
    """``H(p, q) = Hx(p) + Hy(q)`` in two space dimensions."""

    x_part: Hamiltonian
    y_part: Hamiltonian
    name: str = "separable2d"
    notes: str = ""

    def __call__(self, p, q):
        return self.x_part(p) + self.y_part(q)

    @property
    def lipschitz(self):
        return (self.x_part.lipschitz, self.y_part.lipschitz)

    def is_convex(self) -> bool:
        return self.x_part.is_convex() and self.y_part.is_convex()

    def describe(self) -> dict:
        return {"name": self.name, "convex": self.is_convex(),
                "lipschitz": list(self.lipschitz), "notes": self.notes}


def gassiat2d() -> SeparableHamiltonian2D:
    """``H(p, q) = |p| - |q|``: nonconvex, loses finite speed of propagation."""
    return SeparableHamiltonian2D(abs_h(), -abs_h(), name="gassiat2d",
                                  notes="nonconvex |p|-|q|, no finite speed of propagation")


_PATTERN = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def from_catalog(key: str):
    """Build a Hamiltonian from a catalog key such as ``"power(0.25)"``."""
    m = _PATTERN.match(key)
    if not m:
        raise ArgumentError(f"malformed Hamiltonian key {key!r}")
    name, arg = m.group(1), m.group(2)
    builders = {"abs": abs_h, "quadratic": quadratic, "power": power,
                "saturated": saturated, "zero": zero, "gassiat2d": gassiat2d}
    if name not in builders:
        raise ArgumentError(f"unknown Hamiltonian {name!r}")
    if arg:
        return builders[name](float(arg))
    if name == "power":
        raise ArgumentError("power needs an exponent, e.g. power(0.25)")
    return builders[name]()


CATALOG_KEYS = ("abs", "quadratic(1)", "power(0.25)", "power(2)", "saturated", "zero", "gassiat2d")

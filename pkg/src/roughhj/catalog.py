"""Built-in problem ingredients with the metadata solver preconditions rely on.

Entries are grouped by kind: Hamiltonians ``H(p)``, second-order operators
``F(X, p)``, semilinear nonlinearities ``H(u)``, conservation-law fluxes
``A(u)``, initial data ``u0(x)`` and driving path kinds.
"""

from __future__ import annotations

import math
import re

import numpy as np

from . import hamiltonians, scl, semilinear
from .errors import ArgumentError

_KEY = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def _parse(key: str):
    m = _KEY.match(key)
    if not m:
        raise ArgumentError(f"malformed catalog key {key!r}")
    args = [float(a) for a in m.group(2).split(",")] if m.group(2) else []
    return m.group(1), args


# -----------------------------------------------------------------------------
# initial data


def _sawtooth(slope: float = 10.0, period: float = 0.5):
    def f(x):
        s = np.mod(np.asarray(x, dtype=float), period)
        return slope * np.minimum(s, period - s)
    return f


_INITIAL = {
    "abs": (lambda: (lambda x: np.abs(x)), "|x|, Lipschitz 1"),
    "sin": (lambda: (lambda x: np.sin(2 * np.pi * x)), "sin(2 pi x), period 1"),
    "gauss": (lambda: (lambda x: np.exp(-10 * (x - 0.5) ** 2)), "exp(-10 (x - 1/2)^2)"),
    "zero": (lambda: (lambda x: np.zeros_like(np.asarray(x, dtype=float))), "u0 = 0"),
    "sawtooth": (_sawtooth, "sawtooth(slope, period), Lipschitz = slope"),
}


def initial_from_catalog(key: str):
    """Vectorized callable ``u0(x)`` for keys such as ``"sawtooth(10, 0.5)"``."""
    name, args = _parse(key)
    if name not in _INITIAL:
        raise ArgumentError(f"unknown initial datum {name!r}")
    return _INITIAL[name][0](*args)


# -----------------------------------------------------------------------------
# path kinds


PATH_KINDS = {
    "brownian": "standard Brownian motion, PCG64 per component, params: components",
    "sawtooth": "alternating slopes +-mu on n equal pieces, params: mu",
    "linear": "B(t) = slope t, params: slope",
    "hoelder": "Takagi-Landsberg function of exponent alpha, params: alpha",
}


# -----------------------------------------------------------------------------
# listing


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else "inf"


def catalog_list() -> dict:
    """Deterministic listing of every catalog entry with its metadata."""
    hams = []
    for key in hamiltonians.CATALOG_KEYS:
        d = hamiltonians.from_catalog(key).describe()
        if isinstance(d["lipschitz"], (list, tuple)):
            d["lipschitz"] = [_json_float(v) for v in d["lipschitz"]]
        else:
            d["lipschitz"] = _json_float(d["lipschitz"])
        d["key"] = key
        hams.append(d)
    ops = []
    for key in ("heat(0.1)", "zero", "max(0.1,0,0;0.2,0,0)", "min(0.1,0,0;0.2,0,0)"):
        F = semilinear.operator_from_catalog(key)
        ops.append({"key": key, "combine": F.combine, "forms": [list(f) for f in F.forms],
                    "max_diffusion": F.max_diffusion, "degenerate_elliptic": True})
    nonlin = []
    for key in ("zero", "linear(1)", "sin"):
        H = semilinear.nonlinearity_from_catalog(key)
        nonlin.append({"key": key, "name": H.name, "notes": H.notes})
    fluxes = []
    for key in ("burgers", "cubic", "linear(1)"):
        d = scl.flux_from_catalog(key).describe()
        d["key"] = key
        fluxes.append(d)
    initial = [{"key": k, "notes": v[1]} for k, v in _INITIAL.items()]
    paths = [{"key": k, "notes": v} for k, v in PATH_KINDS.items()]
    return {"hamiltonians": hams, "operators": ops, "nonlinearities": nonlin,
            "fluxes": fluxes, "initial_data": initial, "path_kinds": paths}


def catalog_rows() -> list:
    """Flat ``(kind, key, convex, lipschitz, notes)`` rows of :func:`catalog_list`."""
    listing = catalog_list()
    rows = []
    for d in listing["hamiltonians"]:
        rows.append(("hamiltonian", d["key"], d["convex"], d["lipschitz"], d["notes"]))
    for d in listing["operators"]:
        rows.append(("operator", d["key"], "", "", f"{d['combine']} of affine forms"))
    for d in listing["nonlinearities"]:
        rows.append(("nonlinearity", d["key"], "", "", d["notes"]))
    for d in listing["fluxes"]:
        rows.append(("flux", d["key"], d["convex"], "", d["notes"]))
    for d in listing["initial_data"]:
        rows.append(("initial", d["key"], "", "", d["notes"]))
    for d in listing["path_kinds"]:
        rows.append(("path", d["key"], "", "", d["notes"]))
    return rows

"""Command-line experiment runner.

Every command writes its tables (CSV), a JSON summary and the resolved
``config.ini`` into ``<out>/<command>-<action>/``. Rerunning that config
reproduces the tables byte for byte. The exit code is 0 when every requested
check passes, 1 when a check fails or a solver refuses its input, and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import catalog as catalog_mod
from . import characteristics as chars
from . import convex, hamiltonians, paths, schemes, scl, semigroup, semilinear
from .errors import ArgumentError, RoughHJError
from .grid import GridFn, read_grid_csv
from .io import (ExperimentConfig, atomic_write, output_root, read_config, write_csv, write_json,
                 write_manifest)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Raised for argument problems that argparse cannot see."""


# -----------------------------------------------------------------------------
# argument parsing helpers


def parse_mesh_list(text: str) -> list:
    """Parse ``"2^-6..2^-9"``, ``"2^-6,2^-7"`` or plain floats into mesh sizes."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        m = re.fullmatch(r"2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)", part)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            step = 1 if b >= a else -1
            out += [2.0 ** k for k in range(a, b + step, step)]
            continue
        m = re.fullmatch(r"2\^(-?\d+)", part)
        out.append(2.0 ** int(m.group(1)) if m else float(part))
    if not out or any(not h > 0 for h in out):
        raise UsageError(f"bad mesh list {text!r}")
    return out


def _mesh(text) -> float:
    return parse_mesh_list(text)[0]


def _ints(text) -> list:
    return [int(v) for v in str(text).split(",") if v.strip()]


def _floats(text) -> list:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _add_path_args(p, seed=True):
    g = p.add_argument_group("driving path")
    g.add_argument("--path-kind", default="brownian",
                   choices=sorted(catalog_mod.PATH_KINDS) + ["zigzag"])
    g.add_argument("--n", type=int, default=1024, help="number of linear pieces")
    g.add_argument("--T", type=float, default=1.0, help="horizon")
    g.add_argument("--mu", type=float, default=1.0, help="sawtooth slope")
    g.add_argument("--slope", type=float, default=1.0, help="linear path slope")
    g.add_argument("--alpha", type=float, default=0.5, help="Hoelder exponent")
    g.add_argument("--knots", default="", help="zigzag knots 't:v,t:v,...'")
    g.add_argument("--path", "--path-file", dest="path_file", default=None,
                   help="CSV with columns t,v1,...")
    if seed:
        g.add_argument("--seed", type=int, default=0)


def _add_grid_args(p, u0="abs", a=-2.0, b=2.0, h="2^-7", boundary="linear"):
    g = p.add_argument_group("initial data")
    g.add_argument("--u0", default=u0, help="initial datum catalog key")
    g.add_argument("--a", type=float, default=a)
    g.add_argument("--b", type=float, default=b)
    g.add_argument("--h", type=_mesh, default=_mesh(h), help="mesh, e.g. 2^-7")
    g.add_argument("--boundary", default=boundary, choices=["linear", "periodic"])


def build_path(args) -> paths.Path:
    if args.path_file:
        return paths.read_path_csv(args.path_file)
    if args.path_kind == "zigzag":
        if not args.knots:
            raise UsageError("zigzag paths need --knots 't:v,t:v,...'")
        pairs = [k.split(":") for k in args.knots.split(",")]
        return paths.zigzag_path([float(t) for t, _ in pairs], [float(v) for _, v in pairs])
    params = {"mu": args.mu, "slope": args.slope, "alpha": args.alpha}
    spec = paths.PathEnsembleSpec(seed=getattr(args, "seed", 0), T=args.T, n=args.n,
                                  kind=args.path_kind, params=params)
    return paths.sample_path(spec)


def build_grid(args) -> GridFn:
    if args.u0.endswith(".csv"):
        return read_grid_csv(args.u0, args.boundary)
    return GridFn.sample(catalog_mod.initial_from_catalog(args.u0), args.a, args.b, args.h,
                         args.boundary)


def _grid_rows(g: GridFn):
    return zip(g.x, g.values)


# -----------------------------------------------------------------------------
# handlers: each returns (passed, summary dict) and writes into ``out``


def cmd_path(args, out):
    path = build_path(args)
    if args.action == "sample":
        pass
    elif args.action == "reduce":
        path = paths.reduce_path(path)
    elif args.action == "stats":
        stats = paths.path_stats(path)
        write_json(out / "stats.json", stats)
        return True, stats
    header = ["t"] + [f"v{i + 1}" for i in range(path.components)]
    write_csv(out / "path.csv", header, ([t, *row] for t, row in zip(path.times, path.values)))
    return True, {"knots": int(path.times.size), "T": path.horizon}


def cmd_convex(args, out):
    if args.action in ("legendre", "envelope"):
        f = build_grid(args)
        g = convex.legendre(f) if args.action == "legendre" else convex.convex_envelope(f)
        write_csv(out / f"{args.action}.csv", ["x", "value"], _grid_rows(g))
        return True, {"points": int(g.values.size)}
    H = hamiltonians.from_catalog(args.H)
    if args.action == "iterate":
        traj, blew_up = convex.hopf_iterate(H, args.delta, args.steps)
        ms = [m for _, m in traj]
        write_csv(out / "iterate.csv", ["k", "m_k"], ((k, m) for k, m in enumerate(ms)))
        kmin = min(20, max(1, len(ms) // 4))
        summary = {"blew_up": blew_up, "final": ms[-1],
                   "growth_exponent": convex.growth_exponent(ms, kmin) if blew_up else None}
        write_json(out / "summary.json", summary)
        return True, summary
    u0 = build_grid(args)
    solver = convex.hopf_solve if args.action == "hopf" else convex.lax_oleinik_solve
    u = solver(H, u0, args.t)
    write_csv(out / "solution.csv", ["x", "u"], _grid_rows(u))
    return True, {"t": args.t, "max": float(u.values.max()), "min": float(u.values.min())}


def _hamiltonian(key: str):
    if key.endswith(".csv"):
        data = np.loadtxt(key, delimiter=",", skiprows=1, ndmin=2)
        return hamiltonians.table(data[:, 0], data[:, 1], name=key)
    return hamiltonians.from_catalog(key)


def cmd_solve(args, out):
    H = _hamiltonian(args.H)
    path = build_path(args)
    u0 = build_grid(args)
    if args.method == "exact":
        u = semigroup.solve_exact(H, path, u0, args.T_solve)
    else:
        u = schemes.solve_with_scheme([H], path, u0, args.T_solve)
    write_csv(out / "solution.csv", ["x", "u"], _grid_rows(u))
    return True, {"T": args.T_solve if args.T_solve is not None else path.horizon,
                  "max": float(u.values.max()), "min": float(u.values.min())}


def cmd_chars(args, out):
    if args.H is None:
        args.H = "saturated" if args.action == "scaling" else "quadratic(1)"
    if args.action == "scaling":
        H = hamiltonians.from_catalog(args.H)
        dF = chars.cosine_forcing()[1] if args.F == "cos" else np.zeros_like
        res = chars.window_scaling_experiment(H, dF, _floats(args.lambdas), samples=args.samples,
                                              horizon=args.horizon)
        write_csv(out / "windows.csv", ["lambda", "t_star", "t_star_coarse", "halving_gap"],
                  ([r["lambda"], r["t_star"], r["t_star_coarse"], r["halving_gap"]]
                   for r in res["rows"]))
        summary = {"slope": res["slope"], "constant": res["constant"],
                   "bound": -1.0 / 3.0 - 0.1, "passed": res["slope"] >= -1.0 / 3.0 - 0.1}
        write_json(out / "summary.json", summary)
        return summary["passed"], summary
    H = hamiltonians.from_catalog(args.H)
    path = build_path(args)
    field = chars.integrate_homogeneous(H, build_grid(args), path)
    window = chars.invertibility_window(field, args.threshold)
    summary = {"window": window, "horizon": float(field.times[-1])}
    if args.action == "run":
        write_csv(out / "characteristics.csv", ["x0", "X", "P", "U", "J"],
                  zip(field.x0, field.X[:, -1], field.P[:, -1], field.U[:, -1], field.J[:, -1]))
    else:
        write_csv(out / "jacobian.csv", ["t", "min_J"], zip(field.times, field.J.min(axis=0)))
    write_json(out / "summary.json", summary)
    return True, summary


def cmd_scheme(args, out):
    if args.action == "rates":
        seeds = _ints(args.seeds)
        res = schemes.rate_harness(args.problem, parse_mesh_list(args.hs), seeds, args.theta)
        write_csv(out / "rates.csv", ["h", "seed", "rho_h", "sup_error", "normalized_error"],
                  ([r["h"], r["seed"], r["rho_h"], r["sup_error"], r["normalized_error"]]
                   for r in res["rows"]))
        summary = {"slope": res["slope"], "medians": res["medians"]}
        write_json(out / "summary.json", summary)
        return True, summary
    if args.action == "gassiat":
        tooth = paths.sample_path(paths.PathEnsembleSpec(T=1.0, n=2 * args.teeth, kind="sawtooth",
                                                         params={"mu": 2 * args.teeth}))
        res = schemes.gassiat_experiment(args.R, tooth, args.h, theta=args.theta)
        write_json(out / "summary.json", res)
        return True, res
    H = hamiltonians.from_catalog(args.H)
    path = build_path(args)
    u0 = build_grid(args)
    L = H.slope_bound(u0.lipschitz())
    if args.path_kind == "brownian" and not args.path_file:
        cfg = schemes.build_partition_brownian(path, u0.h, args.theta, L)
    else:
        cfg = schemes.build_partition_cts(path, u0.h, args.theta, L)
    run = schemes.evolve(cfg, u0, hamiltonians=[H])
    write_csv(out / "solution.csv", ["x", "u"], _grid_rows(run.final))
    summary = {"rho_h": cfg.rho, "block": cfg.block, "steps": run.diagnostics.get("steps")}
    write_json(out / "summary.json", summary)
    return True, summary


def cmd_semilinear(args, out):
    F = semilinear.operator_from_catalog(args.F)
    Hu = semilinear.nonlinearity_from_catalog(args.Hu)
    path = build_path(args)
    u0 = build_grid(args)
    snaps = _floats(args.snapshots) if args.snapshots else None
    u, diag = semilinear.solve_semilinear(F, Hu, path, u0, path.horizon, snapshot_times=snaps,
                                          return_diagnostics=True)
    write_csv(out / "solution.csv", ["x", "u"], _grid_rows(u))
    if args.export_flow:
        write_csv(out / "flow.csv", ["s", "v", "phi", "dphi", "ddphi"], diag["flow"].to_rows())
    summary = {k: v for k, v in diag.items() if k not in ("snapshots", "flow")}
    write_json(out / "summary.json", summary)
    return True, summary


def _flux(key: str):
    if key.endswith(".csv"):
        data = np.loadtxt(key, delimiter=",", skiprows=1, ndmin=2)
        return scl.table_flux(data[:, 0], data[:, 1], name=key)
    return scl.flux_from_catalog(key)


def _scl_field(args):
    return scl.ConservedField.sample(catalog_mod.initial_from_catalog(args.u0), args.a, args.b,
                                     args.cells)


def cmd_scl(args, out):
    A = _flux(args.flux)
    path = build_path(args)
    h = (args.b - args.a) / args.cells
    if args.action == "run":
        u = scl.pathwise_scl_solve(A, path, _scl_field(args))
        write_csv(out / "solution.csv", ["x", "u"], zip(u.x, u.values))
        summary = {"mass": u.mass, "total_variation": u.total_variation}
        write_json(out / "summary.json", summary)
        return True, summary
    if args.action == "contraction":
        rng = np.random.default_rng(args.seed)
        pairs = [(_random_bv(rng, args.cells), _random_bv(rng, args.cells))
                 for _ in range(args.pairs)]
        rep = scl.contraction_suite(A, path, pairs)
        rep["bound"] = 3 * (1.0 / args.cells)
        rep["passed"] = rep["l1_gap"] <= rep["bound"]
        write_json(out / "summary.json", rep)
        return rep["passed"], rep
    run = scl.pathwise_scl_solve(A, path, _scl_field(args), record=True)
    kin = scl.kinetic_transport_check(A, run, stride=max(1, len(run) // 60))
    kin["bound"] = kin["defect_bound"] + 5 * h
    kin["passed"] = kin["defect_total"] <= kin["bound"]
    write_json(out / "summary.json", kin)
    return kin["passed"], kin


def _random_bv(rng, n):
    k = int(rng.integers(2, 7))
    cuts = np.sort(rng.uniform(0, 1, k))
    vals = rng.uniform(-1, 1, k)
    return scl.ConservedField.sample(lambda x: vals[np.searchsorted(cuts, x % 1.0) % k],
                                     0.0, 1.0, n)


def cmd_acceptance(args, out):
    from . import acceptance

    if args.suite != "primary":
        raise UsageError(f"unknown suite {args.suite!r}")
    only = _ints(args.only) if args.only else None

    def progress(rec):
        print(rec.line(), flush=True)

    records = acceptance.run_suite(only, progress)
    write_manifest(out / "manifest.json", records)
    passed = all(r.passed for r in records)
    return passed, {"passed": sum(r.passed for r in records), "total": len(records)}


def cmd_catalog(args, out):
    listing = catalog_mod.catalog_list()
    write_json(out / "catalog.json", listing)
    for row in catalog_mod.catalog_rows():
        print("\t".join(str(v) for v in row))
    return True, None


# -----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rough-hj", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="run the command described by a key = value config")
    parser.add_argument("--out", help="output root (default $ROUGHHJ_OUT or ./roughhj_out)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("path", help="sample, reduce or summarize driving paths")
    p.add_argument("action", choices=["sample", "reduce", "stats"])
    _add_path_args(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("convex", help="conjugates, envelopes, Hopf and Lax-Oleinik formulas")
    p.add_argument("action", choices=["legendre", "envelope", "hopf", "lo", "iterate"])
    p.add_argument("--H", default="abs", help="Hamiltonian catalog key")
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=200)
    _add_grid_args(p)
    p.set_defaults(func=cmd_convex)

    p = sub.add_parser("solve", help="exact pathwise solution for convex H")
    p.add_argument("--H", default="abs")
    p.add_argument("--method", default="exact", choices=["exact", "scheme"])
    p.add_argument("--at", dest="T_solve", type=float, default=None, help="evaluation time")
    _add_path_args(p)
    _add_grid_args(p)
    p.set_defaults(func=cmd_solve, action="run")

    p = sub.add_parser("chars", help="characteristics and invertibility windows")
    p.add_argument("action", choices=["run", "window", "scaling"])
    p.add_argument("--H", default=None,
                   help="Hamiltonian (default quadratic(1); saturated for scaling)")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--lambdas", "--lambda-grid", dest="lambdas", default="10,100,1000,10000")
    p.add_argument("--F", default="cos", choices=["cos", "zero"], help="forcing F(x)")
    p.add_argument("--samples", type=int, default=9)
    p.add_argument("--horizon", type=float, default=4.0)
    _add_path_args(p)
    _add_grid_args(p, u0="sin", a=0.0, b=1.0)
    p.set_defaults(func=cmd_chars)

    p = sub.add_parser("scheme", help="monotone finite-difference scheme")
    p.add_argument("action", choices=["run", "rates", "gassiat"])
    p.add_argument("--H", default="abs")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--problem", default="lipschitz",
                   help="lipschitz, hoelder(alpha), brownian or randomwalk")
    p.add_argument("--hs", default="2^-6..2^-9", help="mesh list for rates")
    p.add_argument("--seeds", default="0", help="comma-separated seeds for rates")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--teeth", type=int, default=2)
    _add_path_args(p)
    _add_grid_args(p)
    p.set_defaults(func=cmd_scheme)

    p = sub.add_parser("semilinear", help="semilinear equations by change of unknown")
    p.add_argument("action", choices=["run"])
    p.add_argument("--F", default="heat(0.1)")
    p.add_argument("--H", "--Hu", dest="Hu", default="linear(1)",
                   help="noise nonlinearity H(u)")
    p.add_argument("--export-flow", action="store_true", help="also write the flow table")
    p.add_argument("--snapshots", default="")
    _add_path_args(p)
    _add_grid_args(p, u0="gauss", a=0.0, b=1.0, boundary="periodic")
    p.set_defaults(func=cmd_semilinear)

    p = sub.add_parser("scl", help="conservation laws with rough flux")
    p.add_argument("action", choices=["run", "contraction", "kinetic"])
    p.add_argument("--A", "--flux", dest="flux", default="burgers",
                   help="flux catalog key or CSV table with columns u,A")
    p.add_argument("--u0", default="sin")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--cells", type=int, default=256)
    p.add_argument("--pairs", type=int, default=10)
    _add_path_args(p)
    p.set_defaults(func=cmd_scl)

    p = sub.add_parser("acceptance", help="run the acceptance criteria")
    p.add_argument("--suite", default="primary")
    p.add_argument("--only", default="", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_acceptance, action="run")

    p = sub.add_parser("catalog", help="list built-in problem ingredients")
    p.set_defaults(func=cmd_catalog, action="list")
    return parser


def config_to_argv(cfg: ExperimentConfig) -> list:
    """Translate a config into the equivalent command line."""
    argv = cfg.subcommand.replace(".", " ").split()
    for k, v in cfg.params.items():
        flag = f"--{k.replace('_', '-')}"
        if isinstance(v, bool) or str(v).lower() in ("true", "false"):
            if v is True or str(v).lower() == "true":
                argv.append(flag)
            continue
        argv += [flag, str(v)]
    return argv


def _resolved_config(args) -> ExperimentConfig:
    skip = {"command", "action", "func", "config", "out"}
    params = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    sub = args.command if args.command in ("acceptance", "catalog", "solve") \
        else f"{args.command}.{args.action}"
    return ExperimentConfig(sub, params, args.out)


_DEST_TO_FLAG = {"T_solve": "at"}


def _config_mode(argv: list):
    """``(config file, out)`` when ``--config`` appears anywhere, else ``None``.

    In config mode the file defines the command; other tokens except
    ``--out`` are ignored.
    """
    def value(flag):
        for i, a in enumerate(argv):
            if a == flag and i + 1 < len(argv):
                return argv[i + 1]
            if a.startswith(flag + "="):
                return a.split("=", 1)[1]
        return None

    cfg = value("--config")
    return None if cfg is None else (cfg, value("--out"))


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        mode = _config_mode(argv)
        if mode is not None:
            cfg = read_config(mode[0])
            cfg.params = {_DEST_TO_FLAG.get(k, k): v for k, v in cfg.params.items()}
            out = mode[1] or cfg.out
            argv = (["--out", out] if out else []) + config_to_argv(cfg)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        out = output_root(args.out) / f"{args.command}-{args.action}"
        passed, summary = args.func(args, out)
        cfg = _resolved_config(args)
        cfg.params = {_DEST_TO_FLAG.get(k, k): v for k, v in cfg.params.items()}
        atomic_write(out / "config.ini", cfg.to_text())
        if summary is not None and args.command != "acceptance":
            print(json.dumps(summary, default=float, sort_keys=True))
        return EXIT_OK if passed else EXIT_FAIL
    except (ArgumentError, UsageError, OSError) as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except RoughHJError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

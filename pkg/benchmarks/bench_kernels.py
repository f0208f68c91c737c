"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json results.json]

Each kernel runs on identical inputs in both backends; the table reports the
best wall time per backend, the speedup and the largest output difference.
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from roughhj import _pykernels
from roughhj.kernels import TAG_ABS, TAG_QUADRATIC, TAG_SATURATED

try:
    from roughhj import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    n1 = 4096
    u1 = np.cumsum(rng.uniform(-1, 1, n1)) / n1
    dB = rng.uniform(-1, 1, (400, 2)) * 0.4 / n1
    tags = np.array([TAG_ABS, TAG_QUADRATIC])
    params = np.array([0.0, 1.0])
    scales = np.array([1.0, 1.0])
    yield ("lf_run_1d 4096 x 400 steps",
           lambda m: m.lf_run_1d(u1, dB, 1.0 / n1, 1.0, tags, params, scales, False, 0.0, 0.0))

    n2 = 256
    u2 = rng.normal(size=(n2, n2)) * 0.01
    dB2 = rng.uniform(-1, 1, (40, 1)) * 0.2 / n2
    one, zero_ = np.array([1.0]), np.array([0.0])
    xt, yt = np.array([TAG_SATURATED]), np.array([TAG_ABS])
    ghost = tuple(np.zeros(n2) for _ in range(4))
    yield ("lf_run_2d 256^2 x 40 steps",
           lambda m: m.lf_run_2d(u2, dB2, 1.0 / n2, 1.0 / n2, 1.0, xt, zero_, one, yt, zero_,
                                 -one, False, ghost))

    ext = rng.normal(size=20000 + 400)
    kernel = (np.arange(401) - 200.0) ** 2 / 4e4
    yield "window_max 20000 x 401", lambda m: m.window_max(ext, kernel)

    x = np.linspace(-1, 1, 200000)
    f = np.sin(7 * x) + x * x
    yield "lower_hull 200000 points", lambda m: m.lower_hull(x, f, 1e12)


def bench(fn, repeat):
    fn()  # warm-up
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results to this file")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; run 'pip install -e . --no-build-isolation'",
              file=sys.stderr)
        return 1
    rows = []
    print(f"{'kernel':<30}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max diff':>12}")
    for name, call in cases(np.random.default_rng(0)):
        tp = bench(lambda: call(_pykernels), args.repeat)
        tc = bench(lambda: call(_ckernels), args.repeat)
        diff = float(np.max(np.abs(np.asarray(call(_pykernels), dtype=float)
                                   - np.asarray(call(_ckernels), dtype=float))))
        rows.append({"kernel": name, "python": tp, "compiled": tc, "speedup": tp / tc,
                     "max_diff": diff})
        print(f"{name:<30}{tp:>12.4f}{tc:>14.4f}{tp / tc:>10.1f}{diff:>12.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())

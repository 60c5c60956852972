"""Time the compiled quadrature core against the pure-Python fallback.

    python benchmarks/bench_core.py [--reps 5] [--min-time 0.2] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import sys

from recursum.bench import time_callable
from recursum.quadrature import _core_py, legendre_matrix, miller_pad


def _cases():
    m = legendre_matrix(16)
    c = [1.0 / (k + 1) for k in range(32)]
    return [
        ("boys_eval(m=16, T=3.5)", lambda core: core.boys_eval(16, 3.5)),
        ("boys_eval(m=16, T=45)", lambda core: core.boys_eval(16, 45.0)),
        ("clenshaw_sum(N=31)", lambda core: core.clenshaw_sum(c, 0.3)),
        ("miller_bessel_i(n=20, x=4)", lambda core: core.miller_bessel_i(20, 4.0, miller_pad(4.0))),
        ("tridiag_ql(16)", lambda core: core.tridiag_ql(list(m.diag), list(m.offdiag), 480)),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--min-time", type=float, default=0.2)
    parser.add_argument("--json", metavar="PATH")
    args = parser.parse_args(argv)

    try:
        from recursum.quadrature import _core as compiled
    except ImportError:
        print("compiled core not built; only the Python fallback is timed", file=sys.stderr)
        compiled = None

    rows = []
    print(f"{'kernel':<30} {'python ns':>12} {'cython ns':>12} {'speedup':>8}")
    for label, run in _cases():
        py_ns, _ = time_callable(lambda: run(_core_py), args.reps, min_time=args.min_time)
        cy_ns = None
        if compiled is not None:
            cy_ns, _ = time_callable(lambda: run(compiled), args.reps, min_time=args.min_time)
        speed = f"{py_ns / cy_ns:8.1f}" if cy_ns else "       -"
        cy_text = f"{cy_ns:12.1f}" if cy_ns else "           -"
        print(f"{label:<30} {py_ns:12.1f} {cy_text} {speed}")
        rows.append({"kernel": label, "python_ns": py_ns, "cython_ns": cy_ns})
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())

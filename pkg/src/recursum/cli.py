"""Command-line entry point: ``recursum <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from pathlib import Path

from .bench import run_bench
from .codegen import Bounds, SourceArtifact, generate
from .codegen.profiles import PROFILES, default_profile_id
from .errors import RecursumError
from .library import builtin, list_builtins
from .spec import load_spec_file, render_spec
from .validation import BACKENDS, supported_backends, validate

EXIT_ERROR = 1
EXIT_TOLERANCE = 2


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _resolve(name_or_path: str):
    """A builtin entry by name, else a spec loaded from a file path."""
    if name_or_path in list_builtins():
        return builtin(name_or_path)
    path = Path(name_or_path)
    if path.exists():
        return load_spec_file(path.read_text(encoding="utf-8"))
    return builtin(name_or_path)  # raises UnknownBuiltin


def _spec_of(target):
    return getattr(target, "spec", target)


def _write_json(path: str | None, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_list(args) -> int:
    print(f"{'name':<18} {'arity':>5}  {'unrolled':<8} {'layered':<7} {'runtime':<7} oracle")
    for name in list_builtins():
        e = builtin(name)
        flags = ["yes" if b in supported_backends(e.spec) else "no" for b in BACKENDS]
        oracle = "yes" if e.oracle is not None else "no"
        print(f"{name:<18} {e.spec.arity:>5}  {flags[0]:<8} {flags[1]:<7} {flags[2]:<7} {oracle}")
    return 0


def cmd_show(args) -> int:
    sys.stdout.write(render_spec(_spec_of(_resolve(args.name))))
    return 0


def cmd_generate(args) -> int:
    target = _resolve(args.spec)
    spec = _spec_of(target)
    bounds = None
    if args.backend != "runtime":
        if args.bound is not None:
            bounds = target.bounds_at(args.bound) if hasattr(target, "bounds_at") else Bounds.level(spec, args.bound)
        elif hasattr(target, "default_bounds"):
            bounds = target.default_bounds
        else:
            raise CliError("USAGE", f"--bound is required for backend {args.backend}")
    art = generate(spec, args.backend, bounds, args.profile, args.max_instances)
    written = art.write(args.output)
    for path in written:
        print(path)
    return 0


def cmd_validate(args) -> int:
    target = _resolve(args.spec)
    bounds = None
    if args.bound is not None:
        spec = _spec_of(target)
        bounds = target.bounds_at(args.bound) if hasattr(target, "bounds_at") else Bounds.level(spec, args.bound)
    elif not hasattr(target, "default_bounds"):
        raise CliError("USAGE", "--bound is required for a spec file")
    artifacts = None
    if args.artifacts:
        artifacts = {}
        for directory in args.artifacts:
            art = SourceArtifact.read(directory)
            artifacts[art.manifest["backend"]] = art
    report = validate(
        target,
        backends=args.backends,
        samples=args.samples,
        seed=args.seed,
        profile=args.profile,
        bounds=bounds,
        artifacts=artifacts,
    )
    print(report.text())
    if args.json:
        _write_json(args.json, report.to_json())
    if not report.ok:
        print(f"ERR:TOLERANCE {report.spec} exceeds tolerance", file=sys.stderr)
        return EXIT_TOLERANCE
    return 0


def cmd_bench(args) -> int:
    report = run_bench(
        args.spec,
        bound=args.bounds,
        backends=args.backends,
        reps=args.reps,
        profile=args.profile,
        seed=args.seed,
        min_time=args.min_time,
    )
    print(report.text())
    if args.json:
        _write_json(args.json, report.to_json())
    return 0


def cmd_demo_jk(args) -> int:
    from .jk import ToySystem, random_density, random_system, run_demo

    rng = random.Random(args.seed)
    if args.shells:
        system = ToySystem.parse(Path(args.shells).read_text(encoding="utf-8"))
    else:
        system = random_system(rng)
    D = random_density(rng, system.n_basis)
    result = run_demo(system, D)
    if args.json:
        _write_json("-", result.to_json())
        return 0
    for title, M in (("J", result.J), ("K", result.K), ("J naive", result.J_naive), ("K naive", result.K_naive)):
        print(f"{title}:")
        for row in M:
            print("  " + " ".join(f"{x:14.8f}" for x in row))
    print(f"max deviation: {result.max_deviation:.3e}")
    return 0


def cmd_quad(args) -> int:
    from . import quadrature as q

    n = args.n
    if args.family == "legendre":
        m, mu0 = q.legendre_matrix(n), 2.0
    elif args.family == "chebyshev":
        m = q.jacobi_matrix(lambda k: 1.0 if k == 1 else 2.0, lambda k: 0.0, lambda k: 1.0, n)
        mu0 = math.pi
    elif args.family == "hermite":
        m = q.jacobi_matrix(lambda k: 2.0, lambda k: 0.0, lambda k: 2.0 * (k - 1), n)
        mu0 = math.sqrt(math.pi)
    else:
        a = args.alpha
        m = q.jacobi_matrix(lambda k: -1.0 / k, lambda k: (2 * k + a - 1) / k, lambda k: (k + a - 1) / k, n)
        mu0 = math.gamma(a + 1.0)
    rule = q.golub_welsch(m, mu0)
    text = rule.to_csv()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"ERR:USAGE {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recursum", description="Recurrence kernel generator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list built-in recurrences")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("show", help="print a spec in the spec-file format")
    p.add_argument("name")
    p.set_defaults(func=cmd_show)

    profiles = sorted(PROFILES)

    p = sub.add_parser("generate", help="emit kernel source plus manifest")
    p.add_argument("spec", help="builtin name or spec file")
    p.add_argument("--backend", choices=BACKENDS, required=True)
    p.add_argument("--bound", type=int, help="index bound level (default: the builtin's bounds)")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.add_argument("--profile", choices=profiles, default=None)
    p.add_argument("--max-instances", type=int, default=10_000)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="backend-vs-interpreter and oracle checks")
    p.add_argument("spec")
    p.add_argument("--backends", nargs="+", choices=BACKENDS)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int)
    p.add_argument("--profile", choices=profiles, default=None)
    p.add_argument("--artifacts", nargs="+", metavar="DIR", help="validate pre-generated artifact directories")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="time generated kernels (report only)")
    p.add_argument("spec")
    p.add_argument("--bounds", type=int)
    p.add_argument("--backends", nargs="+", choices=BACKENDS)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--min-time", type=float, default=0.2, help="seconds per repetition (cap)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", choices=profiles, default=None)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("demo-jk", help="toy J/K build against the naive oracle")
    p.add_argument("--shells", metavar="FILE", help="lines of 'x y z l exponent'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo_jk)

    p = sub.add_parser("quad", help="Golub-Welsch rule as CSV (node,weight)")
    p.add_argument("family", choices=["legendre", "chebyshev", "hermite", "laguerre"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.0, help="Laguerre parameter")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_quad)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "profile", None) is None and hasattr(args, "profile") and args.command != "bench":
        args.profile = default_profile_id()
    try:
        return args.func(args)
    except RecursumError as exc:
        print(f"ERR:{exc.code} {_one_line(exc)}", file=sys.stderr)
        return EXIT_ERROR
    except CliError as exc:
        print(f"ERR:{exc.code} {_one_line(exc)}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"ERR:{type(exc).__name__.upper()} {_one_line(exc)}", file=sys.stderr)
        return EXIT_ERROR


def _one_line(exc: BaseException) -> str:
    return " | ".join(str(exc).splitlines()) or type(exc).__name__


if __name__ == "__main__":
    sys.exit(main())

"""Built-in microbenchmark harness for generated kernels.

Monotonic clock, a warm-up batch, then the median over repetitions of the
per-call time. Timings are report-only.
"""

from __future__ import annotations

import json
import os
import platform
import random
import statistics
import time
from dataclasses import dataclass, field

from .codegen import Bounds, OpCount, count_ops, generate, load, reach_limits
from .codegen.ir import enumerate_instances
from .codegen.loader import find_compiler
from .library import BuiltinEntry, builtin
from .validation import supported_backends, validate

SHELL_CLASSES = (
    ("ss", (0, 0)),
    ("sp", (0, 1)),
    ("pp", (1, 1)),
    ("sd", (0, 2)),
    ("pd", (1, 2)),
    ("dd", (2, 2)),
    ("ff", (3, 3)),
    ("gg", (4, 4)),
)
DEFAULT_REPS = 5
MIN_CALLS = 100_000
MIN_TIME = 0.2
MAX_ROWS = 8


@dataclass
class BenchRecord:
    spec: str
    backend: str
    key: tuple[int, ...]
    label: str
    median_ns: float
    iterations: int
    ops: OpCount

    def to_json(self) -> dict:
        return {
            "tuple": list(self.key),
            "label": self.label,
            "median_ns": self.median_ns,
            "iterations": self.iterations,
            "ops": {"adds": self.ops.adds, "muls": self.ops.muls, "divs": self.ops.divs},
        }


@dataclass
class BenchReport:
    spec: str
    profile: str
    records: list[BenchRecord] = field(default_factory=list)

    def by_backend(self) -> dict[str, list[BenchRecord]]:
        out: dict[str, list[BenchRecord]] = {}
        for r in self.records:
            out.setdefault(r.backend, []).append(r)
        return out

    def to_json(self) -> list[dict]:
        """One schema object per backend."""
        host = {"description": host_description(self.profile)}
        return [
            {
                "spec": self.spec,
                "backend": backend,
                "rows": [r.to_json() for r in rows],
                "host": host,
            }
            for backend, rows in self.by_backend().items()
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def text(self) -> str:
        lines = [f"bench {self.spec} (profile {self.profile})"]
        lines.append(f"  {'label':<8} {'tuple':<14} {'backend':<9} {'median ns':>12} {'calls':>9} {'flops':>7}")
        for r in sorted(self.records, key=lambda r: (sum(r.key), r.key, r.backend)):
            lines.append(
                f"  {r.label:<8} {str(r.key):<14} {r.backend:<9} {r.median_ns:>12.1f} {r.iterations:>9} {r.ops.flops:>7}"
            )
        return "\n".join(lines)


def host_description(profile: str) -> str:
    cc = find_compiler() if profile == "c99" else None
    parts = [platform.platform(), platform.python_implementation() + " " + platform.python_version()]
    parts.append(f"cpu_count={os.cpu_count()}")
    parts.append(f"profile={profile}" + (f" cc={cc}" if cc else ""))
    return "; ".join(parts)


def time_callable(fn, reps: int = DEFAULT_REPS, min_calls: int = MIN_CALLS, min_time: float = MIN_TIME):
    """Median ns per call over ``reps`` repetitions.

    A repetition ends once it has made ``min_calls`` calls or spent
    ``min_time`` seconds, whichever comes first. Returns ``(median_ns, calls)``
    where ``calls`` is the total over all repetitions.
    """
    clock = time.perf_counter_ns
    for _ in range(10):
        fn()
    per_call = []
    total = 0
    budget = int(min_time * 1e9)
    for _ in range(reps):
        calls = 0
        batch = 16
        start = clock()
        elapsed = 0
        while calls < min_calls and elapsed < budget:
            for _ in range(batch):
                fn()
            calls += batch
            elapsed = clock() - start
            batch = min(batch * 2, 4096)
        per_call.append(elapsed / calls)
        total += calls
    return statistics.median(per_call), total


def _spread(values: list, count: int) -> list:
    if len(values) <= count:
        return list(values)
    step = (len(values) - 1) / (count - 1)
    return [values[round(k * step)] for k in range(count)]


def bench_targets(entry: BuiltinEntry, bound: int) -> list[tuple[str, tuple[int, ...]]]:
    """Row keys: descent tuples for layered specs, index tuples otherwise."""
    spec = entry.spec
    if entry.name == "hermite_e":
        return [(label, key) for label, key in SHELL_CLASSES if sum(key) <= bound]
    bounds = entry.bounds_at(bound)
    points = sorted(enumerate_instances(spec, bounds), key=lambda p: (sum(p), p))
    if spec.layered is not None:
        pos = [spec.indices.index(d) for d in spec.layered.descent]
        layers = sorted({tuple(p[k] for k in pos) for p in points}, key=lambda l: (sum(l), l))
        return [("layer", l) for l in _spread(layers, MAX_ROWS)]
    return [("point", p) for p in _spread(points, MAX_ROWS)]


def _layer_points(spec, layer):
    ann = spec.layered
    pos = {n: i for i, n in enumerate(spec.indices)}
    out = []
    for t in range(sum(layer) + 1):
        p = [0] * spec.arity
        for name, v in zip(ann.descent, layer):
            p[pos[name]] = v
        p[pos[ann.output_axis]] = t
        p = tuple(p)
        if spec.in_domain(p):
            out.append(p)
    return out


def default_bench_bound(entry: BuiltinEntry) -> int:
    if entry.name == "hermite_e":
        return max(sum(k) for _, k in SHELL_CLASSES)
    return max(v for _, v in entry.default_bounds.limits)


def run_bench(
    name: str,
    bound: int | None = None,
    backends=None,
    reps: int = DEFAULT_REPS,
    profile: str | None = None,
    seed: int = 0,
    min_calls: int = MIN_CALLS,
    min_time: float = MIN_TIME,
    check: bool = True,
) -> BenchReport:
    entry = builtin(name)
    spec = entry.spec
    profile = profile or ("c99" if find_compiler() else "python")
    bound = default_bench_bound(entry) if bound is None else bound
    bounds = entry.bounds_at(bound)
    backends = tuple(backends) if backends else supported_backends(spec)
    if check:
        report = validate(entry, backends, samples=3, seed=seed, profile=profile, bounds=bounds, oracle_samples=0)
        if not report.ok:
            from .errors import EvaluationError

            raise EvaluationError(f"{name}: kernels failed validation before benchmarking\n{report.text()}")
    env = entry.sample_env(random.Random(seed))
    arts = {b: generate(spec, b, None if b == "runtime" else bounds, profile) for b in backends}
    kernels = {b: load(a) for b, a in arts.items()}
    layered_rows = spec.layered is not None and any(lbl != "point" for lbl, _ in bench_targets(entry, bound))

    out = BenchReport(spec.name, profile)
    for label, key in bench_targets(entry, bound):
        points = _layer_points(spec, key) if layered_rows else [key]
        for b in backends:
            kern, ir = kernels[b], arts[b].ir
            if b == "layered":
                fn = kern.bind(key, env)
                ops = count_ops(ir, [key])
            elif b == "unrolled":
                calls = [kern.bind(p, env) for p in points]
                fn = _chain(calls)
                ops = count_ops(ir, points)
            else:
                limits = reach_limits(spec, points)
                calls = [kern.bind_runtime(p, env, limits) for p in points]
                fn = _chain(calls)
                ops = count_ops(ir)
            median, iters = time_callable(fn, reps, min_calls, min_time)
            out.records.append(BenchRecord(spec.name, b, tuple(key), label, median, iters, ops))
    return out


def _chain(calls):
    if len(calls) == 1:
        return calls[0]

    def run():
        for c in calls:
            c()

    return run

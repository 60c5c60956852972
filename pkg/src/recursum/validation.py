"""Backend-vs-interpreter equivalence and oracle suites."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .codegen import Bounds, SourceArtifact, generate, load, reach_limits
from .codegen.ir import enumerate_instances
from .interp import Evaluator
from .library import BuiltinEntry, builtin, generic_env, list_builtins
from .spec.model import RecurrenceSpec

BACKENDS = ("unrolled", "layered", "runtime")
BACKEND_TOL = 1e-12
ORACLE_TOL = 1e-10


def rel_err(value: float, ref: float, floor: float = 1.0) -> float:
    """|value - ref| / max(floor, |ref|); exact agreement (including inf) is 0."""
    if value == ref:
        return 0.0
    if math.isnan(value) or math.isnan(ref):
        return math.inf
    scale = max(floor, abs(ref))
    return abs(value - ref) / scale if scale > 0 else math.inf


def supported_backends(spec: RecurrenceSpec) -> tuple[str, ...]:
    return tuple(b for b in BACKENDS if b != "layered" or spec.layered is not None)


@dataclass
class BackendResult:
    backend: str
    max_err: float = 0.0
    worst: tuple | None = None
    checked: int = 0

    def note(self, err: float, point, env_index: int) -> None:
        self.checked += 1
        if err > self.max_err:
            self.max_err = err
            self.worst = (tuple(point), env_index)

    def to_json(self) -> dict:
        return {
            "backend": self.backend,
            "max_rel_err": self.max_err,
            "checked": self.checked,
            "worst": None if self.worst is None else {"point": list(self.worst[0]), "env": self.worst[1]},
        }


@dataclass
class ValidationReport:
    spec: str
    samples: int
    seed: int
    bounds: dict
    backends: list[BackendResult] = field(default_factory=list)
    oracle_max_err: float | None = None
    oracle_checked: int = 0
    backend_tol: float = BACKEND_TOL
    oracle_tol: float = ORACLE_TOL

    @property
    def ok(self) -> bool:
        if any(not b.max_err <= self.backend_tol for b in self.backends):
            return False
        return self.oracle_max_err is None or self.oracle_max_err <= self.oracle_tol

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "samples": self.samples,
            "seed": self.seed,
            "bounds": self.bounds,
            "backends": [b.to_json() for b in self.backends],
            "oracle": None
            if self.oracle_max_err is None
            else {"max_rel_err": self.oracle_max_err, "checked": self.oracle_checked},
            "tolerances": {"backend": self.backend_tol, "oracle": self.oracle_tol},
            "ok": self.ok,
        }

    def text(self) -> str:
        lines = [f"spec {self.spec}: {self.samples} envs, seed {self.seed}"]
        lines.append(f"  {'backend':<10} {'checked':>9} {'max rel err':>12}  status")
        for b in self.backends:
            status = "ok" if b.max_err <= self.backend_tol else "FAIL"
            lines.append(f"  {b.backend:<10} {b.checked:>9} {b.max_err:>12.3e}  {status}")
        if self.oracle_max_err is not None:
            status = "ok" if self.oracle_max_err <= self.oracle_tol else "FAIL"
            lines.append(f"  {'oracle':<10} {self.oracle_checked:>9} {self.oracle_max_err:>12.3e}  {status}")
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def _seq_len_for(spec: RecurrenceSpec, bounds: Bounds) -> int:
    art = generate(spec, "unrolled", bounds, "python")
    return max((n for f in art.manifest["functions"] for n in f["seq_lengths"].values()), default=0)


def validate(
    spec_or_entry: RecurrenceSpec | BuiltinEntry | str,
    backends=None,
    samples: int = 20,
    seed: int = 0,
    profile: str | None = None,
    bounds: Bounds | None = None,
    artifacts: dict | None = None,
    oracle_samples: int = 200,
) -> ValidationReport:
    """Compare every backend with the interpreter at every valid point in bounds.

    Backend errors are purely relative; oracle errors use the entry's floor.

    ``artifacts`` maps backend names to pre-built ``SourceArtifact`` objects,
    replacing freshly generated ones (used to check tampered kernels).
    """
    entry = builtin(spec_or_entry) if isinstance(spec_or_entry, str) else spec_or_entry
    if isinstance(entry, BuiltinEntry):
        spec = entry.spec
        bounds = bounds or entry.default_bounds
    else:
        spec, entry = entry, None
        if bounds is None:
            raise ValueError("bounds are required for a spec without a builtin entry")
    backends = tuple(backends) if backends else supported_backends(spec)
    points = sorted(enumerate_instances(spec, bounds))
    limits = reach_limits(spec, points)

    rng = random.Random(seed)
    if entry is not None:
        envs = [entry.sample_env(rng) for _ in range(samples)]
    else:
        seq_len = _seq_len_for(spec, bounds)
        envs = [generic_env(spec, rng, seq_len) for _ in range(samples)]

    kernels = {}
    for b in backends:
        art = (artifacts or {}).get(b)
        if art is None:
            art = generate(spec, b, None if b == "runtime" else bounds, profile)
        kernels[b] = load(art)

    report = ValidationReport(spec.name, samples, seed, bounds.to_json())
    results = {b: BackendResult(b) for b in backends}
    for k, env in enumerate(envs):
        ref = Evaluator(spec, env)
        expected = {p: ref(p) for p in points}
        for b in backends:
            res, kern = results[b], kernels[b]
            if b == "unrolled":
                for p in points:
                    res.note(rel_err(kern.point(p, env), expected[p], 0.0), p, k)
            elif b == "runtime":
                for p in points:
                    res.note(rel_err(kern.runtime(p, env, limits), expected[p], 0.0), p, k)
            else:
                ann = spec.layered
                pos = {n: i for i, n in enumerate(spec.indices)}
                axis = pos[ann.output_axis]
                for key in kern.keys:
                    out = kern.layer(key, env)
                    for t, value in enumerate(out):
                        p = [0] * spec.arity
                        for name, v in zip(ann.descent, key):
                            p[pos[name]] = v
                        p[axis] = t
                        p = tuple(p)
                        if p in expected:
                            res.note(rel_err(value, expected[p], 0.0), p, k)
    report.backends = [results[b] for b in backends]

    if entry is not None and entry.oracle is not None and oracle_samples > 0:
        orng = random.Random(seed + 1)
        worst = 0.0
        for _ in range(oracle_samples):
            point, env = entry.sample_oracle(orng)
            value = Evaluator(spec, env)(point)
            worst = max(worst, rel_err(value, entry.oracle(spec.point_map(point), env), entry.oracle_floor))
        report.oracle_max_err = worst
        report.oracle_checked = oracle_samples
    return report


def validate_all(samples: int = 100, seed: int = 0, profile: str | None = None) -> list[ValidationReport]:
    return [validate(name, samples=samples, seed=seed, profile=profile) for name in list_builtins()]


__all__ = [
    "BACKENDS",
    "BACKEND_TOL",
    "BackendResult",
    "ORACLE_TOL",
    "ValidationReport",
    "rel_err",
    "supported_backends",
    "validate",
    "validate_all",
]

"""Built-in recurrence specs with default bounds, env samplers and oracles."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from ..codegen.ir import Bounds
from ..errors import NoOracle, UnknownBuiltin, ValidationError
from ..interp import EvalEnv
from ..spec.exprparse import Symbols, parse_constraints, parse_expression, parse_value
from ..spec.model import (
    BaseCase,
    BranchAverage,
    LayeredAnnotation,
    RecurrenceSpec,
    Rule,
    Single,
)
from ..spec.validate import validate_spec
from . import oracles

CLENSHAW_N = 18
SINGLE_INDEX_BOUND = 20


def build_spec(
    name: str,
    namespace: str,
    indices,
    scalars=(),
    sequences=(),
    validity: str = "",
    bases=(),
    rules=(),
    layered: tuple[str, tuple[str, ...]] | None = None,
    direction: str = "unspecified",
) -> RecurrenceSpec:
    """Assemble and validate a spec from expression strings.

    ``bases`` holds ``(assignment tuple, value text)`` pairs. ``rules`` holds
    ``(name, guard text, expression text, scale text or None)``; an
    expression given as a list of strings becomes a branch average.
    """
    syms = Symbols(tuple(indices), tuple(scalars), tuple(sequences))
    rule_objs = []
    for rname, guard, expr, scale in rules:
        guards = tuple(parse_constraints(guard, syms)) if guard else ()
        if isinstance(expr, (list, tuple)):
            body = BranchAverage(tuple(parse_expression(e, syms) for e in expr))
        else:
            body = Single(
                parse_expression(expr, syms),
                parse_value(scale, syms, allow_functions=False) if scale else None,
            )
        rule_objs.append(Rule(rname, guards, body))
    spec = RecurrenceSpec(
        name=name,
        namespace=namespace,
        indices=syms.indices,
        scalars=syms.scalars,
        sequences=syms.sequences,
        validity=tuple(parse_constraints(validity, syms)) if validity else (),
        bases=tuple(BaseCase(tuple(a), parse_value(v, syms)) for a, v in bases),
        rules=tuple(rule_objs),
        layered=LayeredAnnotation(layered[0], tuple(layered[1])) if layered else None,
        direction=direction,
    )
    diags = validate_spec(spec)
    if diags:
        raise ValidationError(diags)
    return spec


# --------------------------------------------------------------------------
# env samplers
# --------------------------------------------------------------------------

def _uniform_nonzero(rng: random.Random, lo: float = -2.0, hi: float = 2.0, floor: float = 1e-3) -> float:
    while True:
        v = rng.uniform(lo, hi)
        if abs(v) >= floor:
            return v


def generic_env(spec: RecurrenceSpec, rng: random.Random, seq_len: int = 0) -> EvalEnv:
    """Scalars and sequence entries uniform in [-2, 2], avoiding |v| < 1e-3."""
    scalars = {s: _uniform_nonzero(rng) for s in spec.scalars}
    seqs = {s: [_uniform_nonzero(rng) for _ in range(seq_len)] for s in spec.sequences}
    return EvalEnv(scalars, seqs)


# --------------------------------------------------------------------------
# entries
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BuiltinEntry:
    spec: RecurrenceSpec
    default_bounds: Bounds
    notes: str
    oracle: Callable[[dict, EvalEnv], float] | None = None
    # equivalence-suite env: (rng) -> EvalEnv
    env_sampler: Callable[[random.Random], EvalEnv] | None = field(default=None, repr=False)
    # oracle-suite sample inside the oracle's domain: (rng) -> (point, env)
    oracle_sampler: Callable[[random.Random], tuple] | None = field(default=None, repr=False)
    # relative-error floor used for oracle comparisons: |a - b| <= tol * max(floor, |ref|)
    oracle_floor: float = 1.0

    @property
    def name(self) -> str:
        return self.spec.name

    def sample_env(self, rng: random.Random) -> EvalEnv:
        if self.env_sampler is not None:
            return self.env_sampler(rng)
        return generic_env(self.spec, rng)

    def sample_oracle(self, rng: random.Random):
        if self.oracle is None or self.oracle_sampler is None:
            raise NoOracle(f"{self.name} has no oracle")
        return self.oracle_sampler(rng)

    def bounds_at(self, n: int) -> Bounds:
        """Bounds scaled to level ``n`` using the default bounds' shape."""
        return _LEVEL_BOUNDS.get(self.name, lambda s, n: Bounds.level(s, n))(self.spec, n)

    def supports(self, backend: str) -> bool:
        return backend != "layered" or self.spec.layered is not None


def _point_in(entry_bounds: Bounds, spec, rng: random.Random):
    pts = [p for p in entry_bounds.box(spec) if spec.in_domain(p)]
    return rng.choice(pts)


def _hermite_e() -> BuiltinEntry:
    spec = build_spec(
        "hermite_e",
        "mcmd",
        ["i", "j", "t"],
        ["inv_2p", "PA_x", "PB_x"],
        validity="i >= 0 && j >= 0 && t >= 0 && i + j >= t",
        bases=[((0, 0, 0), "1.0")],
        rules=[
            ("inc_i", "i > 0", "inv_2p * E[i-1,j,t-1] + PA_x * E[i-1,j,t] + (t+1) * E[i-1,j,t+1]", None),
            ("inc_j", "j > 0", "inv_2p * E[i,j-1,t-1] + PB_x * E[i,j-1,t] + (t+1) * E[i,j-1,t+1]", None),
        ],
        layered=("t", ("i", "j")),
    )
    bounds = Bounds.of({"i": 6, "j": 6, "t": 6}, [(("i", "j"), 6)])

    def env(rng):
        p = rng.uniform(0.2, 3.0)
        return EvalEnv({"inv_2p": 1.0 / (2.0 * p), "PA_x": rng.uniform(-2, 2), "PB_x": rng.uniform(-2, 2)})

    def sample(rng):
        return _point_in(bounds, spec, rng), env(rng)

    return BuiltinEntry(
        spec, bounds,
        "Hermite expansion coefficients of a Gaussian product (one Cartesian direction).",
        oracles.hermite_e, env, sample,
    )


def _coulomb_r() -> BuiltinEntry:
    spec = build_spec(
        "coulomb_R",
        "mcmd",
        ["t", "u", "v", "m"],
        ["X", "Y", "Z"],
        ["Fm"],
        validity="t >= 0 && u >= 0 && v >= 0 && m >= 0",
        rules=[
            ("boys", "t == 0 && u == 0 && v == 0", "Fm[m]", None),
            ("t_desc", "t > 0", "(t-1) * E[t-2,u,v,m+1] + X * E[t-1,u,v,m+1]", None),
            ("u_desc", "t == 0 && u > 0", "(u-1) * E[t,u-2,v,m+1] + Y * E[t,u-1,v,m+1]", None),
            ("v_desc", "t == 0 && u == 0 && v > 0", "(v-1) * E[t,u,v-2,m+1] + Z * E[t,u,v-1,m+1]", None),
        ],
    )
    bounds = Bounds.of({"t": 4, "u": 4, "v": 4, "m": 4}, [(("t", "u", "v"), 4)])

    def env(rng):
        from ..quadrature import boys_eval

        alpha = rng.uniform(0.1, 2.0)
        pq = [rng.uniform(-1.5, 1.5) for _ in range(3)]
        T = alpha * sum(c * c for c in pq)
        F = boys_eval(9, T)
        fm = [(-2.0 * alpha) ** k * F[k] for k in range(10)]
        return EvalEnv(dict(zip("XYZ", pq)), {"Fm": fm})

    return BuiltinEntry(
        spec, bounds,
        "McMurchie-Davidson Coulomb auxiliary integrals; Fm[m] carries (-2*alpha)^m F_m(T).",
        None, env,
    )


def _boys() -> BuiltinEntry:
    spec = build_spec(
        "boys", "rys", ["m"], ["T", "exp_T", "inv_2T"],
        validity="m >= 0",
        bases=[((0,), "erf(sqrt(T)) * sqrt(pi / (4*T))")],
        rules=[("upward", "m > 0", "((2*m - 1) * E[m-1] - exp_T) * inv_2T", None)],
        direction="upward",
    )
    bounds = Bounds.of({"m": SINGLE_INDEX_BOUND})

    def env_for(T):
        return EvalEnv({"T": T, "exp_T": math.exp(-T), "inv_2T": 1.0 / (2.0 * T)})

    def env(rng):
        return env_for(rng.uniform(1e-3, 2.0))

    def sample(rng):
        # upward stepping loses about one digit per step while 2T < 2m - 1
        T = rng.uniform(0.5, 40.0)
        m_max = SINGLE_INDEX_BOUND if T >= 5.0 else 6
        return (rng.randint(0, m_max),), env_for(T)

    return BuiltinEntry(
        spec, bounds, "Boys function by upward recurrence from the analytic F_0.",
        oracles.boys, env, sample,
    )


def _bessel(name, first, second, sign, oracle, notes, scaled_by=None) -> BuiltinEntry:
    op = "-" if sign < 0 else "+"
    spec = build_spec(
        name, "bessel_sto", ["n"], ["inv_x", first, second],
        validity="n >= 0",
        bases=[((0,), first), ((1,), second)],
        rules=[("upward", "n > 1", f"E[n-2] {op} (2*n-1) * inv_x * E[n-1]", None)],
        direction="upward",
    )
    bounds = Bounds.of({"n": SINGLE_INDEX_BOUND})

    def env_for(x):
        v0, v1 = oracles.bessel_pair(name, x)
        return EvalEnv({"inv_x": 1.0 / x, first: v0, second: v1})

    def env(rng):
        return env_for(rng.uniform(0.5, 10.0))

    def sample(rng):
        x = rng.uniform(0.5, 10.0)
        if sign < 0:
            # upward i_n is unstable; keep to orders it still resolves to 1e-10
            return (rng.randint(0, 1 + int(x)),), env_for(x)
        return (rng.randint(0, SINGLE_INDEX_BOUND),), env_for(x)

    return BuiltinEntry(spec, bounds, notes, oracle, env, sample, oracle_floor=0.0)


def _poly(name, scalars, bases, rule, oracle, notes, x_range=(-1.0, 1.0), scale=None, extra=None):
    spec = build_spec(
        name, "orthopoly", ["n"], scalars,
        validity="n >= 0",
        bases=bases,
        rules=[rule + (scale,)],
        direction="upward",
    )
    bounds = Bounds.of({"n": SINGLE_INDEX_BOUND})

    def env_for(rng):
        values = {"x": rng.uniform(*x_range)}
        if extra:
            values.update(extra(rng))
        return EvalEnv(values)

    def sample(rng):
        return (rng.randint(0, SINGLE_INDEX_BOUND),), env_for(rng)

    return BuiltinEntry(spec, bounds, notes, oracle, env_for, sample)


def _clenshaw() -> BuiltinEntry:
    spec = clenshaw_spec(CLENSHAW_N)
    bounds = Bounds.of({"k": CLENSHAW_N + 2})

    def env(rng):
        return EvalEnv(
            {"x": rng.uniform(-1.0, 1.0)},
            {"c": [rng.uniform(-1.0, 1.0) for _ in range(CLENSHAW_N + 1)]},
        )

    def sample(rng):
        return (rng.randint(0, CLENSHAW_N + 2),), env(rng)

    return BuiltinEntry(
        spec, bounds,
        f"Clenshaw backward sums b_k for a degree-{CLENSHAW_N} Chebyshev series.",
        oracles.clenshaw, env, sample,
    )


def clenshaw_spec(N: int) -> RecurrenceSpec:
    """Clenshaw b_k = 2x b_{k+1} - b_{k+2} + c_k for k <= N, with b_{N+1} = b_{N+2} = 0."""
    return build_spec(
        "clenshaw", "chebyshev", ["k"], ["x"], ["c"],
        validity=f"k >= 0 && k <= {N + 2}",
        bases=[((N + 1,), "0.0"), ((N + 2,), "0.0")],
        rules=[("backward", f"k <= {N}", "2*x*E[k+1] - E[k+2] + c[k]", None)],
        direction="downward",
    )


def _rys_alpha() -> BuiltinEntry:
    spec = build_spec(
        "rys_alpha", "rys", ["k"], (), ["F"],
        validity="k >= 0",
        rules=[("ratio", "k >= 0", "F[k+1] / F[k]", None)],
    )
    bounds = Bounds.of({"k": SINGLE_INDEX_BOUND})

    def env(rng):
        from ..quadrature import boys_eval

        return EvalEnv({}, {"F": list(boys_eval(SINGLE_INDEX_BOUND + 1, rng.uniform(0.1, 20.0)))})

    def sample(rng):
        return (rng.randint(0, SINGLE_INDEX_BOUND),), env(rng)

    return BuiltinEntry(
        spec, bounds, "Rys recurrence coefficient alpha_k = F_{k+1}/F_k from Boys values.",
        oracles.rys_alpha, env, sample,
    )


def _binomial() -> BuiltinEntry:
    spec = build_spec(
        "binomial", "combinatorics", ["n", "k"],
        validity="n >= 0 && k >= 0 && k <= n",
        bases=[((0, 0), "1.0")],
        rules=[("pascal", "n > 0", "E[n-1,k-1] + E[n-1,k]", None)],
        layered=("k", ("n",)),
    )
    bounds = Bounds.of({"n": SINGLE_INDEX_BOUND, "k": SINGLE_INDEX_BOUND})

    def sample(rng):
        return _point_in(bounds, spec, rng), EvalEnv()

    return BuiltinEntry(
        spec, bounds, "Binomial coefficients by Pascal's rule.",
        oracles.binomial, lambda rng: EvalEnv(), sample,
    )


def _fibonacci() -> BuiltinEntry:
    spec = build_spec(
        "fibonacci", "combinatorics", ["n"], ["f0", "f1"],
        validity="n >= 0",
        bases=[((0,), "f0"), ((1,), "f1")],
        rules=[("sum", "n > 1", "E[n-1] + E[n-2]", None)],
        direction="upward",
    )
    bounds = Bounds.of({"n": SINGLE_INDEX_BOUND})

    def sample(rng):
        return (rng.randint(0, SINGLE_INDEX_BOUND),), generic_env(spec, rng)

    return BuiltinEntry(
        spec, bounds, "Fibonacci-type sequence with runtime seeds f0, f1.",
        oracles.fibonacci, None, sample,
    )


def _entries() -> dict[str, BuiltinEntry]:
    entries = [
        _hermite_e(),
        _coulomb_r(),
        _boys(),
        _bessel("bessel_i", "i0", "i1", -1, oracles.bessel_i,
                "Modified spherical Bessel i_n, upward (unstable) recurrence."),
        _bessel("bessel_k", "k0", "k1", +1, oracles.bessel_k,
                "Modified spherical Bessel k_n, upward (stable) recurrence."),
        _bessel("bessel_a_scaled", "a0", "a1", +1, oracles.bessel_a,
                "Scaled a_n = exp(x) k_n, same recurrence as k_n."),
        _bessel("bessel_b_scaled", "b0", "b1", -1, oracles.bessel_b,
                "Scaled b_n = exp(-x) i_n, same recurrence as i_n."),
        _poly("legendre_P", ["x"], [((0,), "1.0"), ((1,), "x")],
              ("three_term", "n > 1", "(2*n-1) * x * E[n-1] + (-(n-1)) * E[n-2]"),
              oracles.legendre, "Legendre polynomials, scaled three-term form.", scale="1/n"),
        _poly("chebyshev_T", ["x"], [((0,), "1.0"), ((1,), "x")],
              ("three_term", "n > 1", "2*x * E[n-1] - E[n-2]"),
              oracles.chebyshev, "Chebyshev polynomials of the first kind."),
        _poly("hermite_H", ["x"], [((0,), "1.0"), ((1,), "2*x")],
              ("three_term", "n > 1", "2*x * E[n-1] - 2*(n-1) * E[n-2]"),
              oracles.hermite_h, "Physicists' Hermite polynomials.", x_range=(-2.0, 2.0)),
        _poly("laguerre_L", ["x", "alpha"], [((0,), "1.0"), ((1,), "1 + alpha - x")],
              ("three_term", "n > 1", "((2*n + alpha - 1 - x) * E[n-1] - (n + alpha - 1) * E[n-2]) / n"),
              oracles.laguerre, "Generalized Laguerre polynomials (alpha > -1).",
              x_range=(0.0, 10.0), extra=lambda rng: {"alpha": rng.uniform(-0.9, 3.0)}),
        _clenshaw(),
        _rys_alpha(),
        _binomial(),
        _fibonacci(),
    ]
    return {e.name: e for e in entries}


_LEVEL_BOUNDS = {
    "hermite_e": lambda s, n: Bounds.of({"i": n, "j": n, "t": n}, [(("i", "j"), n)]),
    "coulomb_R": lambda s, n: Bounds.of({"t": n, "u": n, "v": n, "m": n}, [(("t", "u", "v"), n)]),
}

_CACHE: dict[str, BuiltinEntry] = {}


def _registry() -> dict[str, BuiltinEntry]:
    if not _CACHE:
        _CACHE.update(_entries())
    return _CACHE


def list_builtins() -> list[str]:
    return list(_registry())


def builtin(name: str) -> BuiltinEntry:
    try:
        return _registry()[name]
    except KeyError:
        raise UnknownBuiltin(f"unknown builtin {name!r}; see list_builtins()") from None


def oracle_value(name: str, point, env: EvalEnv | None = None) -> float:
    entry = builtin(name)
    if entry.oracle is None:
        raise NoOracle(f"{name} has no independent oracle")
    if not isinstance(point, dict):
        point = dict(zip(entry.spec.indices, point))
    return entry.oracle(point, env if env is not None else EvalEnv())


def spec_file_text(name: str) -> str:
    """The shipped spec file for a builtin."""
    return resources.files("recursum.library").joinpath("specs", f"{name}.rec").read_text("utf-8")

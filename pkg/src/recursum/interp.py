"""Memoized reference evaluator: the ground truth every backend is checked against."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    CycleDetected,
    DivisionByZero,
    EvaluationError,
    NoApplicableRule,
    SequenceOutOfRange,
)
from .spec.model import (
    BaseCase,
    Bin,
    BranchAverage,
    FuncCall,
    IndexCoeff,
    Num,
    Pi,
    RecurrenceSpec,
    Rule,
    Scalar,
    SeqRef,
    Sum,
    all_hold,
    eval_int,
    scale_divisor,
)
from .spec.validate import order_rules

_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "erf": math.erf}


@dataclass(frozen=True)
class EvalEnv:
    scalars: Mapping[str, float] = field(default_factory=dict)
    sequences: Mapping[str, Sequence[float]] = field(default_factory=dict)

    def check(self, spec: RecurrenceSpec) -> None:
        missing = [s for s in spec.scalars if s not in self.scalars]
        missing += [s for s in spec.sequences if s not in self.sequences]
        if missing:
            raise EvaluationError(f"{spec.name}: unbound runtime inputs {missing}")


# --------------------------------------------------------------------------
# rule selection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    case: BaseCase


@dataclass(frozen=True)
class Matched:
    rule: Rule


@dataclass(frozen=True)
class OutOfDomain:
    pass


@dataclass(frozen=True)
class NoRule:
    pass


def _ordered(spec: RecurrenceSpec) -> list[Rule]:
    cached = getattr(spec, "_ordered_rules", None)
    if cached is None:
        cached = order_rules(spec)
        object.__setattr__(spec, "_ordered_rules", cached)
    return cached


def select_rule(spec: RecurrenceSpec, point) -> Base | Matched | OutOfDomain | NoRule:
    point = as_point(spec, point)
    pmap = spec.point_map(point)
    if not all_hold(spec.validity, pmap):
        return OutOfDomain()
    base = spec.base_at(point)
    if base is not None:
        return Base(base)
    for rule in _ordered(spec):
        if all_hold(rule.guards, pmap):
            return Matched(rule)
    return NoRule()


def as_point(spec: RecurrenceSpec, point) -> tuple[int, ...]:
    if isinstance(point, Mapping):
        if set(point) != set(spec.indices):
            raise EvaluationError(
                f"{spec.name}: point must assign exactly {list(spec.indices)}, got {sorted(point)}"
            )
        return tuple(int(point[i]) for i in spec.indices)
    point = tuple(int(v) for v in point)
    if len(point) != spec.arity:
        raise EvaluationError(f"{spec.name}: expected {spec.arity} indices, got {len(point)}")
    return point


# --------------------------------------------------------------------------
# coefficient arithmetic
# --------------------------------------------------------------------------

def eval_coeff(expr, pmap: Mapping[str, int], env: EvalEnv) -> float:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Scalar):
        return float(env.scalars[expr.name])
    if isinstance(expr, IndexCoeff):
        return float(eval_int(expr.expr, pmap))
    if isinstance(expr, SeqRef):
        k = eval_int(expr.index, pmap)
        seq = env.sequences[expr.name]
        if k < 0 or k >= len(seq):
            raise SequenceOutOfRange(
                f"{expr.name}[{k}] out of range (length {len(seq)})"
            )
        return float(seq[k])
    if isinstance(expr, Pi):
        return math.pi
    if isinstance(expr, FuncCall):
        arg = eval_coeff(expr.arg, pmap, env)
        try:
            return _FUNCS[expr.name](arg)
        except ValueError as exc:
            raise EvaluationError(f"{expr.name}({arg!r}): {exc}") from None
    left = eval_coeff(expr.left, pmap, env)
    right = eval_coeff(expr.right, pmap, env)
    return apply_op(expr.op, left, right)


def apply_op(op: str, left: float, right: float) -> float:
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if right == 0.0:
        raise DivisionByZero(f"division by zero ({left!r} / 0)")
    return left / right


def combine_rule(rule: Rule, pmap, env: EvalEnv, lookup) -> float:
    """Apply one rule body; ``lookup(call)`` yields the value at a shifted point."""
    sums = [_eval_sum(s, pmap, env, lookup) for s in rule.body.sums]
    if isinstance(rule.body, BranchAverage):
        acc = sums[0]
        for v in sums[1:]:
            acc = acc + v
        return acc * (1.0 / len(sums))
    value = sums[0]
    scale = rule.body.scale
    if scale is None:
        return value
    divisor = scale_divisor(scale)
    if divisor is not None:
        return apply_op("/", value, eval_coeff(divisor, pmap, env))
    factor = eval_coeff(scale, pmap, env)
    if factor == 0.0:
        raise DivisionByZero(f"rule {rule.name!r}: scale evaluates to zero")
    return value * factor


def _eval_sum(expr: Sum, pmap, env: EvalEnv, lookup) -> float:
    acc = None
    for term in expr.terms:
        c = eval_coeff(term.coeff, pmap, env)
        v = c if term.call is None else c * lookup(term.call)
        acc = v if acc is None else acc + v
    return acc


# --------------------------------------------------------------------------
# evaluation sessions
# --------------------------------------------------------------------------

class Evaluator:
    """One evaluation session: a fixed spec, a fixed env, and a memo table."""

    def __init__(self, spec: RecurrenceSpec, env: EvalEnv | None = None, memoize: bool = True):
        self.spec = spec
        self.env = env if env is not None else EvalEnv()
        self.env.check(spec)
        self.memoize = memoize
        self.memo: dict[tuple[int, ...], float] = {}

    def __call__(self, point) -> float:
        point = as_point(self.spec, point)
        if self.memoize:
            return self._eval_iterative(point)
        return self._eval_plain(point, set())

    def _leaf(self, point):
        """Value if ``point`` needs no recursion, else the matched rule."""
        sel = select_rule(self.spec, point)
        if isinstance(sel, OutOfDomain):
            return 0.0
        if isinstance(sel, Base):
            return eval_coeff(sel.case.value, self.spec.point_map(point), self.env)
        if isinstance(sel, NoRule):
            raise NoApplicableRule(f"{self.spec.name}: no rule applies at {point}")
        return sel.rule

    def _eval_plain(self, point, active: set) -> float:
        leaf = self._leaf(point)
        if not isinstance(leaf, Rule):
            return leaf
        if point in active:
            raise CycleDetected(f"{self.spec.name}: {point} depends on itself")
        active.add(point)
        value = combine_rule(
            leaf,
            self.spec.point_map(point),
            self.env,
            lambda call: self._eval_plain(call.target(point), active),
        )
        active.discard(point)
        return value

    def _eval_iterative(self, root) -> float:
        # explicit stack so deep one-index recurrences do not hit the Python recursion limit
        memo = self.memo
        if root in memo:
            return memo[root]
        stack = [root]
        active = {root}
        while stack:
            point = stack[-1]
            leaf = self._leaf(point)
            if not isinstance(leaf, Rule):
                memo[point] = leaf
                stack.pop()
                active.discard(point)
                continue
            pending = None
            for call in leaf.calls():
                target = call.target(point)
                if target not in memo:
                    pending = target
                    break
            if pending is not None:
                if pending in active:
                    raise CycleDetected(f"{self.spec.name}: {pending} depends on itself")
                stack.append(pending)
                active.add(pending)
                continue
            memo[point] = combine_rule(
                leaf, self.spec.point_map(point), self.env, lambda c: memo[c.target(point)]
            )
            stack.pop()
            active.discard(point)
        return memo[root]


def evaluate(spec: RecurrenceSpec, point, env: EvalEnv | None = None, memoize: bool = True) -> float:
    return Evaluator(spec, env, memoize=memoize)(point)


def eval_layer(spec: RecurrenceSpec, layer, env: EvalEnv | None = None) -> list[float]:
    """All output-axis values for one assignment of the descent indices."""
    ann = spec.layered
    if ann is None:
        raise EvaluationError(f"{spec.name}: no layered annotation")
    if isinstance(layer, Mapping):
        values = {d: int(layer[d]) for d in ann.descent}
    else:
        layer = tuple(layer)
        if len(layer) != len(ann.descent):
            raise EvaluationError(f"layer must assign {list(ann.descent)}")
        values = dict(zip(ann.descent, (int(v) for v in layer)))
    ev = Evaluator(spec, env)
    out = []
    for t in range(sum(values.values()) + 1):
        out.append(ev({**values, ann.output_axis: t}))
    return out

"""Lowering from a recurrence spec to kernel IR, one strategy per backend."""

from __future__ import annotations

import itertools
import math

from ..errors import (
    BoundsTooLarge,
    CycleDetected,
    DivisionByZero,
    GenerationError,
    NoApplicableRule,
    NotLayerDescent,
    UnsupportedConstruct,
)
from ..interp import Base, Matched, NoRule, OutOfDomain, apply_op, select_rule
from ..spec.model import (
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
    eval_int,
    scale_divisor,
)
from ..spec.validate import layer_diagnostics, order_rules
from .ir import (
    ZERO,
    Alloc,
    Assign,
    Bounds,
    Call,
    Const,
    Expr,
    IndexVal,
    Invoke,
    IRFunction,
    KernelIR,
    Local,
    Op,
    Param,
    RegionLoad,
    Return,
    RuntimePlan,
    SeqLoad,
    SeqLoadDyn,
    Store,
    TableLoad,
    enumerate_instances,
    is_leaf,
)

DEFAULT_MAX_INSTANCES = 10_000
ONE_C = Const(1.0)


def _tag(values) -> str:
    return "_".join(f"m{-v}" if v < 0 else str(v) for v in values)


def point_name(spec: RecurrenceSpec, point) -> str:
    return f"{spec.name}_{_tag(point)}"


def layer_name(spec: RecurrenceSpec, layer) -> str:
    return f"{spec.name}_layer_{_tag(layer)}"


def runtime_name(spec: RecurrenceSpec) -> str:
    return f"{spec.name}_runtime"


# --------------------------------------------------------------------------
# folding arithmetic builders
# --------------------------------------------------------------------------

def fold(op: str, left: Expr, right: Expr) -> Expr:
    """Build ``left op right`` with exact-only simplifications (no reassociation)."""
    if isinstance(left, Const) and isinstance(right, Const):
        try:
            return Const(apply_op(op, left.value, right.value))
        except DivisionByZero:
            raise GenerationError("constant division by zero in coefficient") from None
    if op == "*":
        if left == ONE_C:
            return right
        if right == ONE_C:
            return left
    if op == "/" and right == ONE_C:
        return left
    return Op(op, left, right)


def _static_coeff(expr, pmap, seq_req: dict) -> Expr:
    """Coefficient tree at a fixed index point."""
    if isinstance(expr, Num):
        return Const(expr.value)
    if isinstance(expr, Pi):
        return Const(math.pi)
    if isinstance(expr, Scalar):
        return Param(expr.name)
    if isinstance(expr, IndexCoeff):
        return Const(float(eval_int(expr.expr, pmap)))
    if isinstance(expr, SeqRef):
        k = eval_int(expr.index, pmap)
        if k < 0:
            raise GenerationError(f"sequence read {expr.name}[{k}] has a negative index")
        seq_req[expr.name] = max(seq_req.get(expr.name, 0), k + 1)
        return SeqLoad(expr.name, k)
    if isinstance(expr, FuncCall):
        return Call(expr.name, _static_coeff(expr.arg, pmap, seq_req))
    # keep Num-op-Num folding identical to what the interpreter computes at run time
    return fold(expr.op, _static_coeff(expr.left, pmap, seq_req), _static_coeff(expr.right, pmap, seq_req))


def _dynamic_coeff(expr) -> Expr:
    if isinstance(expr, Num):
        return Const(expr.value)
    if isinstance(expr, Pi):
        return Const(math.pi)
    if isinstance(expr, Scalar):
        return Param(expr.name)
    if isinstance(expr, IndexCoeff):
        return IndexVal(expr.expr)
    if isinstance(expr, SeqRef):
        return SeqLoadDyn(expr.name, expr.index)
    if isinstance(expr, FuncCall):
        return Call(expr.name, _dynamic_coeff(expr.arg))
    return fold(expr.op, _dynamic_coeff(expr.left), _dynamic_coeff(expr.right))


def _sum_expr(expr: Sum, coeff_of, value_of, drop_zero: bool) -> Expr:
    acc = None
    for term in expr.terms:
        c = coeff_of(term.coeff)
        if term.call is None:
            v = c
        else:
            child = value_of(term.call)
            if drop_zero and (child == ZERO or c == ZERO):
                continue
            v = fold("*", c, child)
        if drop_zero and v == ZERO:
            continue
        acc = v if acc is None else fold("+", acc, v)
    return ZERO if acc is None else acc


def rule_expr(rule: Rule, coeff_of, value_of, drop_zero: bool) -> Expr:
    """IR for one rule body, mirroring the interpreter's evaluation order."""
    sums = [_sum_expr(s, coeff_of, value_of, drop_zero) for s in rule.body.sums]
    if isinstance(rule.body, BranchAverage):
        kept = [s for s in sums if not (drop_zero and s == ZERO)]
        if not kept:
            return ZERO
        acc = kept[0]
        for s in kept[1:]:
            acc = fold("+", acc, s)
        return fold("*", acc, Const(1.0 / len(sums)))
    value = sums[0]
    scale = rule.body.scale
    if scale is None:
        return value
    if drop_zero and value == ZERO:
        return ZERO
    divisor = scale_divisor(scale)
    if divisor is not None:
        return fold("/", value, coeff_of(divisor))
    return fold("*", value, coeff_of(scale))


# --------------------------------------------------------------------------
# unrolled
# --------------------------------------------------------------------------

class _PointLowering:
    """Inline the recursion tree of one point, one local per distinct sub-tuple."""

    def __init__(self, spec: RecurrenceSpec):
        self.spec = spec
        self.statements: list = []
        self.cache: dict = {}
        self.active: set = set()
        self.seq_req: dict = {}

    def value(self, point, root: bool = False) -> Expr:
        if point in self.cache:
            return self.cache[point]
        spec = self.spec
        pmap = spec.point_map(point)
        sel = select_rule(spec, point)
        if isinstance(sel, OutOfDomain):
            return ZERO
        if isinstance(sel, NoRule):
            raise NoApplicableRule(f"{spec.name}: no rule applies at {point}")
        if isinstance(sel, Base):
            expr = _static_coeff(sel.case.value, pmap, self.seq_req)
        else:
            if point in self.active:
                raise CycleDetected(f"{spec.name}: {point} depends on itself")
            self.active.add(point)
            expr = rule_expr(
                sel.rule,
                lambda c: _static_coeff(c, pmap, self.seq_req),
                lambda call: self.value(call.target(point)),
                drop_zero=True,
            )
            self.active.discard(point)
        if not root and not is_leaf(expr):
            local = Local("rs_e_" + _tag(point))
            self.statements.append(Assign(local.name, expr))
            expr = local
        self.cache[point] = expr
        return expr


def lower_unrolled(
    spec: RecurrenceSpec, bounds: Bounds, max_instances: int = DEFAULT_MAX_INSTANCES
) -> KernelIR:
    points = sorted(enumerate_instances(spec, bounds), key=lambda p: (sum(p), p))
    if len(points) > max_instances:
        raise BoundsTooLarge(
            f"{spec.name}: {len(points)} instances exceed the cap of {max_instances}"
        )
    functions = []
    for point in points:
        low = _PointLowering(spec)
        expr = low.value(point, root=True)
        functions.append(
            IRFunction(
                name=point_name(spec, point),
                kind="point",
                key=point,
                params=spec.params,
                statements=tuple(low.statements) + (Return(expr),),
                seq_lengths=tuple(sorted(low.seq_req.items())),
            )
        )
    return KernelIR(
        spec.name, "unrolled", spec.indices, spec.scalars, spec.sequences, tuple(functions), bounds
    )


# --------------------------------------------------------------------------
# layered
# --------------------------------------------------------------------------

def lower_layered(
    spec: RecurrenceSpec, bounds: Bounds, max_instances: int = DEFAULT_MAX_INSTANCES
) -> KernelIR:
    diags = layer_diagnostics(spec)
    if diags:
        raise NotLayerDescent("; ".join(d.message for d in diags))
    ann = spec.layered
    pos = {name: k for k, name in enumerate(spec.indices)}
    axis = pos[ann.output_axis]
    dpos = [pos[d] for d in ann.descent]

    pending = {tuple(p[k] for k in dpos) for p in enumerate_instances(spec, bounds)}
    layers: dict = {}
    while pending:
        layer = pending.pop()
        if layer in layers:
            continue
        if len(layers) >= max_instances:
            raise BoundsTooLarge(f"{spec.name}: more than {max_instances} layer functions")
        fn, pred = _lower_layer(spec, layer, axis, dpos)
        layers[layer] = fn
        if pred is not None and pred not in layers:
            pending.add(pred)
    functions = tuple(layers[k] for k in sorted(layers, key=lambda l: (sum(l), l)))
    return KernelIR(
        spec.name,
        "layered",
        spec.indices,
        spec.scalars,
        spec.sequences,
        functions,
        bounds,
        descent=ann.descent,
        output_axis=ann.output_axis,
    )


def _lower_layer(spec: RecurrenceSpec, layer, axis: int, dpos):
    length = sum(layer) + 1
    pred = None
    pred_len = 0
    seq_req: dict = {}
    stores = []

    def full_point(t):
        point = [0] * spec.arity
        point[axis] = t
        for k, v in zip(dpos, layer):
            point[k] = v
        return tuple(point)

    def read(point, call):
        nonlocal pred, pred_len
        target = call.target(point)
        if not spec.in_domain(target):
            return ZERO
        tlayer = tuple(target[k] for k in dpos)
        if pred is None:
            pred, pred_len = tlayer, sum(tlayer) + 1
        elif tlayer != pred:
            raise NotLayerDescent(
                f"{spec.name}: layer {layer} reads two predecessor layers {pred} and {tlayer}"
            )
        t = target[axis]
        if not 0 <= t < pred_len:
            raise UnsupportedConstruct(
                f"{spec.name}: in-domain read at {target} lies outside its layer region"
            )
        return RegionLoad("prev", t)

    for t in range(length):
        point = full_point(t)
        pmap = spec.point_map(point)
        sel = select_rule(spec, point)
        if isinstance(sel, OutOfDomain):
            expr = ZERO
        elif isinstance(sel, Base):
            expr = _static_coeff(sel.case.value, pmap, seq_req)
        elif isinstance(sel, NoRule):
            raise NoApplicableRule(f"{spec.name}: no rule applies at {point}")
        else:
            expr = rule_expr(
                sel.rule,
                lambda c: _static_coeff(c, pmap, seq_req),
                lambda call, point=point: read(point, call),
                drop_zero=True,
            )
        stores.append(Store("out", t, expr))

    statements = []
    calls = ()
    if pred is not None:
        statements += [Alloc("prev", pred_len), Invoke(layer_name(spec, pred), "prev")]
        calls = (layer_name(spec, pred),)
    statements += stores
    fn = IRFunction(
        name=layer_name(spec, layer),
        kind="layer",
        key=tuple(layer),
        params=spec.params,
        statements=tuple(statements),
        output_length=length,
        inline_hint=True,
        calls=calls,
        seq_lengths=tuple(sorted(seq_req.items())),
    )
    return fn, pred


# --------------------------------------------------------------------------
# runtime
# --------------------------------------------------------------------------

def sweep_order(spec: RecurrenceSpec):
    """Axis order and per-axis direction so every reference precedes its reader.

    Returns ``(order, descending)`` where ``order`` permutes axis positions
    outermost first. The first axis (in that order) on which a reference's
    shift is nonzero decides: negative means the axis ascends, positive
    means it descends.
    """
    shifts = [c.shifts for r in spec.rules for c in r.calls()]
    prefer_down = spec.direction == "downward"
    for order in itertools.permutations(range(spec.arity)):
        want: dict = {}
        ok = True
        for s in shifts:
            lead = next((k for k in order if s[k] != 0), None)
            if lead is None:
                ok = False
                break
            down = s[lead] > 0
            if want.setdefault(lead, down) != down:
                ok = False
                break
        if ok:
            descending = tuple(want.get(k, prefer_down) for k in range(spec.arity))
            return order, descending
    raise UnsupportedConstruct(f"{spec.name}: no lexicographic sweep order satisfies the references")


def lower_runtime(spec: RecurrenceSpec) -> KernelIR:
    order, descending = sweep_order(spec)
    shifts = [c.shifts for r in spec.rules for c in r.calls()]
    extend = []
    for k in range(spec.arity):
        if descending[k]:
            extend.append(any(s[k] < 0 for s in shifts))
        else:
            extend.append(any(s[k] > 0 for s in shifts))
    bases = tuple((b.assignment, _dynamic_coeff(b.value)) for b in spec.bases)
    rules = tuple(
        (
            r.guards,
            rule_expr(r, _dynamic_coeff, lambda call: TableLoad(call.shifts), drop_zero=False),
        )
        for r in order_rules(spec)
    )
    plan = RuntimePlan(
        indices=tuple(spec.indices[k] for k in order),
        descending=tuple(descending[k] for k in order),
        extend=tuple(extend[k] for k in order),
        validity=spec.validity,
        bases=bases,
        rules=rules,
    )
    fn = IRFunction(
        name=runtime_name(spec),
        kind="runtime",
        key=(),
        params=spec.params,
        runtime=plan,
    )
    return KernelIR(spec.name, "runtime", spec.indices, spec.scalars, spec.sequences, (fn,))


def lower(spec: RecurrenceSpec, backend: str, bounds: Bounds | None = None,
          max_instances: int = DEFAULT_MAX_INSTANCES) -> KernelIR:
    if backend == "unrolled":
        return lower_unrolled(spec, bounds, max_instances)
    if backend == "layered":
        return lower_layered(spec, bounds, max_instances)
    if backend == "runtime":
        return lower_runtime(spec)
    raise GenerationError(f"unknown backend {backend!r}")


def reach_limits(spec: RecurrenceSpec, points) -> tuple[int, ...]:
    """Smallest per-index table bounds covering every point the given ones depend on."""
    hi = [0] * spec.arity
    seen = set()
    stack = [tuple(p) for p in points]
    while stack:
        point = stack.pop()
        if point in seen:
            continue
        seen.add(point)
        sel = select_rule(spec, point)
        if isinstance(sel, OutOfDomain):
            continue
        hi = [max(h, v) for h, v in zip(hi, point)]
        if isinstance(sel, Matched):
            stack.extend(c.target(point) for c in sel.rule.calls())
    return tuple(hi)

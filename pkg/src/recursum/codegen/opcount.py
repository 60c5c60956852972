"""Static operation counts over kernel IR."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .ir import Assign, IRFunction, KernelIR, Op, RegionLoad, Return, SeqLoad, SeqLoadDyn, Store, TableLoad, walk


@dataclass(frozen=True)
class OpCount:
    adds: int = 0
    muls: int = 0
    divs: int = 0
    loads: int = 0
    stores: int = 0

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(*(a + b for a, b in zip(self.astuple(), other.astuple())))

    def astuple(self) -> tuple[int, ...]:
        return (self.adds, self.muls, self.divs, self.loads, self.stores)

    @property
    def flops(self) -> int:
        return self.adds + self.muls + self.divs

    def to_json(self) -> dict:
        return asdict(self)


def _expr_ops(expr) -> OpCount:
    adds = muls = divs = loads = 0
    for node in walk(expr):
        if isinstance(node, Op):
            if node.op in "+-":
                adds += 1
            elif node.op == "*":
                muls += 1
            else:
                divs += 1
        elif isinstance(node, (SeqLoad, RegionLoad, SeqLoadDyn, TableLoad)):
            loads += 1
    return OpCount(adds, muls, divs, loads, 0)


def function_ops(fn: IRFunction) -> OpCount:
    """Operations in one function body, not counting callees."""
    total = OpCount()
    for st in fn.statements:
        if isinstance(st, (Assign, Return)):
            total = total + _expr_ops(st.expr)
        elif isinstance(st, Store):
            total = total + _expr_ops(st.expr) + OpCount(stores=1)
    if fn.runtime is not None:
        for _, value in fn.runtime.bases:
            total = total + _expr_ops(value)
        for _, body in fn.runtime.rules:
            total = total + _expr_ops(body)
    return total


def count_ops(ir: KernelIR, outputs=None) -> OpCount:
    """Total work to produce ``outputs`` (function keys; default: every function).

    Unrolled functions are self-contained, so each requested key is charged
    its full body once. Layered functions are charged once each over the
    closure of their predecessor chains.
    """
    by_key = ir.by_key()
    keys = list(by_key) if outputs is None else [tuple(k) for k in outputs]
    if ir.backend != "layered":
        total = OpCount()
        for k in keys:
            total = total + function_ops(by_key[k])
        return total
    seen: set[str] = set()
    stack = [by_key[k].name for k in keys]
    total = OpCount()
    while stack:
        name = stack.pop()
        if name in seen:
            continue
        seen.add(name)
        fn = ir.function(name)
        total = total + function_ops(fn)
        stack.extend(fn.calls)
    return total

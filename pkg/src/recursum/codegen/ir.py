"""Backend-neutral kernel IR.

Point and layer functions are straight-line single-assignment code. The
runtime backend carries a structured ``RuntimePlan`` instead, which each
target profile expands into loops over a dense table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Union

from ..spec.model import Constraint, IntExpr, RecurrenceSpec, all_hold

# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    """Inclusive upper limit per index (lower limit 0), plus optional sum caps."""

    limits: tuple[tuple[str, int], ...]
    caps: tuple[tuple[tuple[str, ...], int], ...] = ()

    @classmethod
    def of(cls, limits: Mapping[str, int], caps=()) -> "Bounds":
        for name, v in limits.items():
            if int(v) < 0:
                raise ValueError(f"bound for {name!r} must be non-negative")
        return cls(
            tuple((k, int(v)) for k, v in limits.items()),
            tuple((tuple(names), int(v)) for names, v in caps),
        )

    @classmethod
    def level(cls, spec: RecurrenceSpec, n: int) -> "Bounds":
        """Every index at most ``n``; descent indices of a layered spec sum to at most ``n``."""
        caps = ()
        if spec.layered is not None and len(spec.layered.descent) > 1:
            caps = ((spec.layered.descent, n),)
        return cls.of({i: n for i in spec.indices}, caps)

    def limit(self, name: str) -> int:
        return dict(self.limits)[name]

    def check(self, spec: RecurrenceSpec) -> None:
        missing = [i for i in spec.indices if i not in dict(self.limits)]
        if missing:
            raise ValueError(f"bounds missing for indices {missing}")

    def contains(self, spec: RecurrenceSpec, point: tuple[int, ...]) -> bool:
        pmap = spec.point_map(point)
        lim = dict(self.limits)
        if any(not 0 <= pmap[i] <= lim[i] for i in spec.indices):
            return False
        return all(sum(pmap[n] for n in names) <= cap for names, cap in self.caps)

    def box(self, spec: RecurrenceSpec):
        self.check(spec)
        lim = dict(self.limits)
        for point in itertools.product(*(range(lim[i] + 1) for i in spec.indices)):
            if self.contains(spec, point):
                yield point

    def to_json(self) -> dict:
        return {"limits": dict(self.limits), "caps": [[list(n), c] for n, c in self.caps]}


def enumerate_instances(spec: RecurrenceSpec, bounds: Bounds) -> set[tuple[int, ...]]:
    """Valid points inside the bounds box: the only ones that get code."""
    return {p for p in bounds.box(spec) if all_hold(spec.validity, spec.point_map(p))}


# --------------------------------------------------------------------------
# expressions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class SeqLoad:
    name: str
    index: int


@dataclass(frozen=True)
class Local:
    name: str


@dataclass(frozen=True)
class RegionLoad:
    region: str
    index: int


@dataclass(frozen=True)
class Op:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


# runtime-only nodes, resolved against the current table cell
@dataclass(frozen=True)
class IndexVal:
    expr: IntExpr


@dataclass(frozen=True)
class SeqLoadDyn:
    name: str
    index: IntExpr


@dataclass(frozen=True)
class TableLoad:
    shifts: tuple[int, ...]


Expr = Union[Const, Param, SeqLoad, Local, RegionLoad, Op, Call, IndexVal, SeqLoadDyn, TableLoad]

ZERO = Const(0.0)


def is_leaf(expr: Expr) -> bool:
    return isinstance(expr, (Const, Param, SeqLoad, Local, RegionLoad))


def walk(expr: Expr):
    yield expr
    if isinstance(expr, Op):
        yield from walk(expr.left)
        yield from walk(expr.right)
    elif isinstance(expr, Call):
        yield from walk(expr.arg)


# --------------------------------------------------------------------------
# statements
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class Store:
    region: str
    index: int
    expr: Expr


@dataclass(frozen=True)
class Alloc:
    region: str
    length: int


@dataclass(frozen=True)
class Invoke:
    function: str
    region: str


@dataclass(frozen=True)
class Return:
    expr: Expr


Stmt = Union[Assign, Store, Alloc, Invoke, Return]


@dataclass(frozen=True)
class RuntimePlan:
    indices: tuple[str, ...]
    descending: tuple[bool, ...]
    # True: sweep the whole caller bound on that axis; False: stop at the requested index
    extend: tuple[bool, ...]
    validity: tuple[Constraint, ...]
    bases: tuple[tuple[tuple[int, ...], Expr], ...]
    rules: tuple[tuple[tuple[Constraint, ...], Expr], ...]


@dataclass(frozen=True)
class IRFunction:
    name: str
    kind: str  # "point" | "layer" | "runtime"
    key: tuple[int, ...]
    params: tuple[str, ...]
    statements: tuple[Stmt, ...] = ()
    output_length: int | None = None
    inline_hint: bool = False
    calls: tuple[str, ...] = ()
    seq_lengths: tuple[tuple[str, int], ...] = ()
    runtime: RuntimePlan | None = None

    @property
    def locals(self) -> tuple[str, ...]:
        return tuple(s.target for s in self.statements if isinstance(s, Assign))

    @property
    def regions(self) -> tuple[tuple[str, int], ...]:
        return tuple((s.region, s.length) for s in self.statements if isinstance(s, Alloc))


@dataclass(frozen=True)
class KernelIR:
    spec_name: str
    backend: str
    indices: tuple[str, ...]
    scalars: tuple[str, ...]
    sequences: tuple[str, ...]
    functions: tuple[IRFunction, ...]
    bounds: Bounds | None = None
    descent: tuple[str, ...] = ()
    output_axis: str | None = None
    _by_name: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {f.name: f for f in self.functions})

    def function(self, name: str) -> IRFunction:
        return self._by_name[name]

    def by_key(self) -> dict[tuple[int, ...], IRFunction]:
        return {f.key: f for f in self.functions}

    @property
    def params(self) -> tuple[str, ...]:
        return self.scalars + self.sequences

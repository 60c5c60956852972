"""Immutable data model for recurrence definitions.

Integer index arithmetic (``IntExpr``) and real-valued coefficient trees
(``CoeffExpr``) are kept apart: the former is exact and decidable at
generation time, the latter may depend on runtime inputs.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

_INT_OPS = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_CMP_OPS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
FUNCTIONS = ("sqrt", "exp", "erf")


# --------------------------------------------------------------------------
# integer index expressions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ILit:
    value: int


@dataclass(frozen=True)
class ISym:
    name: str


@dataclass(frozen=True)
class IBin:
    op: str
    left: "IntExpr"
    right: "IntExpr"


IntExpr = Union[ILit, ISym, IBin]


def eval_int(expr: IntExpr, point: Mapping[str, int]) -> int:
    if isinstance(expr, ILit):
        return expr.value
    if isinstance(expr, ISym):
        return point[expr.name]
    return _INT_OPS[expr.op](eval_int(expr.left, point), eval_int(expr.right, point))


def int_symbols(expr: IntExpr) -> set[str]:
    if isinstance(expr, ISym):
        return {expr.name}
    if isinstance(expr, IBin):
        return int_symbols(expr.left) | int_symbols(expr.right)
    return set()


def render_int(expr: IntExpr) -> str:
    if isinstance(expr, ILit):
        return f"({expr.value})" if expr.value < 0 else str(expr.value)
    if isinstance(expr, ISym):
        return expr.name
    return f"({render_int(expr.left)} {expr.op} {render_int(expr.right)})"


@dataclass(frozen=True)
class Constraint:
    lhs: IntExpr
    op: str
    rhs: IntExpr

    def holds(self, point: Mapping[str, int]) -> bool:
        return _CMP_OPS[self.op](eval_int(self.lhs, point), eval_int(self.rhs, point))

    def render(self) -> str:
        return f"{_strip(render_int(self.lhs))} {self.op} {_strip(render_int(self.rhs))}"


def _strip(text: str) -> str:
    # outer parens are redundant on either side of a comparison
    if text.startswith("(") and text.endswith(")"):
        depth = 0
        for k, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and k < len(text) - 1:
                return text
        return text[1:-1]
    return text


def all_hold(constraints, point: Mapping[str, int]) -> bool:
    return all(c.holds(point) for c in constraints)


# --------------------------------------------------------------------------
# coefficient expressions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Scalar:
    name: str


@dataclass(frozen=True)
class IndexCoeff:
    expr: IntExpr


@dataclass(frozen=True)
class SeqRef:
    name: str
    index: IntExpr


@dataclass(frozen=True)
class FuncCall:
    name: str
    arg: "CoeffExpr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "CoeffExpr"
    right: "CoeffExpr"


CoeffExpr = Union[Num, Pi, Scalar, IndexCoeff, SeqRef, FuncCall, Bin]

ONE = Num(1.0)


def render_num(value: float) -> str:
    text = repr(float(value))
    return f"({text})" if value < 0 or text.startswith("-") else text


def render_coeff(expr: CoeffExpr) -> str:
    if isinstance(expr, Num):
        return render_num(expr.value)
    if isinstance(expr, Pi):
        return "pi"
    if isinstance(expr, Scalar):
        return expr.name
    if isinstance(expr, IndexCoeff):
        return render_int(expr.expr)
    if isinstance(expr, SeqRef):
        return f"{expr.name}[{_strip(render_int(expr.index))}]"
    if isinstance(expr, FuncCall):
        return f"{expr.name}({_strip(render_coeff(expr.arg))})"
    return f"({render_coeff(expr.left)} {expr.op} {render_coeff(expr.right)})"


def coeff_walk(expr: CoeffExpr):
    yield expr
    if isinstance(expr, Bin):
        yield from coeff_walk(expr.left)
        yield from coeff_walk(expr.right)
    elif isinstance(expr, FuncCall):
        yield from coeff_walk(expr.arg)


def has_runtime(expr: CoeffExpr) -> bool:
    return any(isinstance(n, (Scalar, SeqRef)) for n in coeff_walk(expr))


# --------------------------------------------------------------------------
# rule bodies
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RecCall:
    """Self-reference with constant offsets, one per index in declaration order."""

    shifts: tuple[int, ...]

    def target(self, point: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(p + s for p, s in zip(point, self.shifts))


@dataclass(frozen=True)
class Term:
    coeff: CoeffExpr
    call: RecCall | None = None


@dataclass(frozen=True)
class Sum:
    terms: tuple[Term, ...]

    def calls(self):
        return [t.call for t in self.terms if t.call is not None]


@dataclass(frozen=True)
class Single:
    expr: Sum
    scale: CoeffExpr | None = None

    @property
    def sums(self) -> tuple[Sum, ...]:
        return (self.expr,)


@dataclass(frozen=True)
class BranchAverage:
    branches: tuple[Sum, ...]

    @property
    def sums(self) -> tuple[Sum, ...]:
        return self.branches


RuleBody = Union[Single, BranchAverage]


def scale_divisor(scale: CoeffExpr) -> CoeffExpr | None:
    """``1/X`` scales lower to a division by ``X``; anything else multiplies."""
    if isinstance(scale, Bin) and scale.op == "/" and scale.left == ONE:
        return scale.right
    return None


@dataclass(frozen=True)
class Rule:
    name: str
    guards: tuple[Constraint, ...]
    body: RuleBody

    def calls(self) -> list[RecCall]:
        return [c for s in self.body.sums for c in s.calls()]

    def priority_key(self) -> tuple[int, int]:
        eq_count = sum(1 for c in self.guards if c.op == "==")
        return (-eq_count, -len(self.guards))


@dataclass(frozen=True)
class BaseCase:
    assignment: tuple[int, ...]
    value: CoeffExpr


@dataclass(frozen=True)
class LayeredAnnotation:
    output_axis: str
    descent: tuple[str, ...]


DIRECTIONS = ("upward", "downward", "unspecified")


@dataclass(frozen=True)
class RecurrenceSpec:
    name: str
    namespace: str
    indices: tuple[str, ...]
    scalars: tuple[str, ...] = ()
    sequences: tuple[str, ...] = ()
    validity: tuple[Constraint, ...] = ()
    bases: tuple[BaseCase, ...] = ()
    rules: tuple[Rule, ...] = ()
    layered: LayeredAnnotation | None = None
    direction: str = "unspecified"
    _base_map: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_base_map", {b.assignment: b for b in self.bases})

    @property
    def arity(self) -> int:
        return len(self.indices)

    @property
    def params(self) -> tuple[str, ...]:
        return self.scalars + self.sequences

    def point_map(self, point: tuple[int, ...]) -> dict[str, int]:
        return dict(zip(self.indices, point))

    def in_domain(self, point: tuple[int, ...]) -> bool:
        return all_hold(self.validity, self.point_map(point))

    def base_at(self, point: tuple[int, ...]) -> BaseCase | None:
        return self._base_map.get(tuple(point))

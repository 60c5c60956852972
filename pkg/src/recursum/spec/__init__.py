"""Recurrence spec model, parser and validator."""

from .exprparse import Symbols, parse_constraints, parse_expression, parse_value, render_sum
from .model import (
    BaseCase,
    Bin,
    BranchAverage,
    Constraint,
    FuncCall,
    IBin,
    ILit,
    IndexCoeff,
    ISym,
    LayeredAnnotation,
    Num,
    Pi,
    RecCall,
    RecurrenceSpec,
    Rule,
    Scalar,
    SeqRef,
    Single,
    Sum,
    Term,
)
from .specfile import load_spec_file, render_spec
from .validate import Diagnostic, order_rules, validate_spec

__all__ = [
    "BaseCase", "Bin", "BranchAverage", "Constraint", "Diagnostic", "FuncCall", "IBin",
    "ILit", "ISym", "IndexCoeff", "LayeredAnnotation", "Num", "Pi", "RecCall",
    "RecurrenceSpec", "Rule", "Scalar", "SeqRef", "Single", "Sum", "Symbols", "Term",
    "load_spec_file", "order_rules", "parse_constraints", "parse_expression",
    "parse_value", "render_spec", "render_sum", "validate_spec",
]

"""Exception hierarchy.

Every error carries a short machine-greppable ``code`` used by the CLI
(``ERR:<CODE>`` on stderr).
"""

from __future__ import annotations


class RecursumError(Exception):
    code = "ERROR"


# --- parsing / validation -------------------------------------------------

class ParseError(RecursumError):
    code = "PARSE"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ExprSyntaxError(ParseError):
    code = "SYNTAX"


class UndeclaredSymbol(ParseError):
    code = "UNDECLARED_SYMBOL"


class MalformedShift(ParseError):
    code = "MALFORMED_SHIFT"


class ValidationError(RecursumError):
    code = "VALIDATION"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# --- evaluation -----------------------------------------------------------

class EvaluationError(RecursumError):
    code = "EVAL"


class NoApplicableRule(EvaluationError):
    code = "NO_RULE"


class DivisionByZero(EvaluationError, ZeroDivisionError):
    code = "DIV_ZERO"


class SequenceOutOfRange(EvaluationError, IndexError):
    code = "SEQ_RANGE"


class CycleDetected(EvaluationError):
    code = "CYCLE"


class TableBoundExceeded(EvaluationError):
    code = "TABLE_BOUND"


# --- generation -----------------------------------------------------------

class GenerationError(RecursumError):
    code = "CODEGEN"


class BoundsTooLarge(GenerationError):
    code = "BOUNDS_TOO_LARGE"


class NotLayerDescent(GenerationError):
    code = "NOT_LAYER_DESCENT"


class UnsupportedConstruct(GenerationError):
    code = "UNSUPPORTED"


class CompileFailure(GenerationError):
    code = "COMPILE"


# --- library / numerics ---------------------------------------------------

class UnknownBuiltin(RecursumError, KeyError):
    code = "UNKNOWN_BUILTIN"

    def __str__(self):
        return Exception.__str__(self)


class NoOracle(RecursumError):
    code = "NO_ORACLE"


class DomainError(RecursumError, ValueError):
    code = "DOMAIN"


class NegativeUnderRoot(DomainError):
    code = "NEGATIVE_UNDER_ROOT"


class NoConvergence(RecursumError, ArithmeticError):
    code = "NO_CONVERGENCE"


class DimensionMismatch(RecursumError, ValueError):
    code = "DIMENSION"

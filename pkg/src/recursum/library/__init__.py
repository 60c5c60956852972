"""Built-in recurrences and their independent oracles."""

from __future__ import annotations

from .builtins import (
    BuiltinEntry,
    build_spec,
    builtin,
    clenshaw_spec,
    generic_env,
    list_builtins,
    oracle_value,
    spec_file_text,
)

__all__ = [
    "BuiltinEntry",
    "build_spec",
    "builtin",
    "clenshaw_spec",
    "generic_env",
    "list_builtins",
    "oracle_value",
    "spec_file_text",
]

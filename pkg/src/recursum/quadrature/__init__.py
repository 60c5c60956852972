"""Quadrature and special-function pipelines (compiled core with a Python fallback)."""

from __future__ import annotations

from . import _core_py
from ._select import core, select_core
from .api import (
    BOYS_M_MAX,
    MILLER_N_MAX,
    QuadRule,
    TridiagSym,
    boys_eval,
    clenshaw_sum,
    golub_welsch,
    jacobi_matrix,
    legendre_matrix,
    miller_bessel_i,
    miller_pad,
    rys_coeffs,
    tridiag_eigen,
)

IMPLEMENTATION = core.IMPLEMENTATION
python_core = _core_py

__all__ = [
    "BOYS_M_MAX",
    "IMPLEMENTATION",
    "MILLER_N_MAX",
    "QuadRule",
    "TridiagSym",
    "boys_eval",
    "clenshaw_sum",
    "core",
    "golub_welsch",
    "jacobi_matrix",
    "legendre_matrix",
    "miller_bessel_i",
    "miller_pad",
    "python_core",
    "rys_coeffs",
    "select_core",
    "tridiag_eigen",
]

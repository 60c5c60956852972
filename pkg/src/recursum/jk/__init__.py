"""Toy J/K matrix demonstration on generated Hermite kernels."""

from __future__ import annotations

from .demo import (
    DemoResult,
    InterpreterSource,
    KernelSource,
    Shell,
    ToySystem,
    asymmetry,
    build_J,
    build_K,
    default_source,
    eri_prefactor,
    eri_tensor,
    gaussian_product,
    hermite_phase,
    naive_JK,
    random_density,
    random_system,
    rel_frobenius,
    run_demo,
)

__all__ = [
    "DemoResult", "InterpreterSource", "KernelSource", "Shell", "ToySystem", "asymmetry",
    "build_J", "build_K", "default_source", "eri_prefactor", "eri_tensor", "gaussian_product",
    "hermite_phase", "naive_JK", "random_density", "random_system", "rel_frobenius", "run_demo",
]

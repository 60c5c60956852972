"""Kernel generation: IR lowering, target profiles, op counts and loading."""

from .artifact import SourceArtifact, emit_layered, emit_runtime, emit_unrolled, generate, render
from .ir import Bounds, KernelIR, enumerate_instances
from .loader import load
from .lower import DEFAULT_MAX_INSTANCES, lower, reach_limits
from .opcount import OpCount, count_ops, function_ops
from .profiles import PROFILES, get_profile

__all__ = [
    "Bounds", "DEFAULT_MAX_INSTANCES", "KernelIR", "OpCount", "PROFILES", "SourceArtifact",
    "count_ops", "emit_layered", "emit_runtime", "emit_unrolled", "enumerate_instances",
    "function_ops", "generate", "get_profile", "load", "lower", "reach_limits", "render",
]

from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from recursum.codegen.loader import find_compiler
from recursum.interp import EvalEnv
from recursum.library import builtin

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

HAVE_CC = find_compiler() is not None
needs_cc = pytest.mark.skipif(not HAVE_CC, reason="no C compiler on PATH")
PROFILES = ("python", "c99") if HAVE_CC else ("python",)


@pytest.fixture(scope="session")
def hermite():
    return builtin("hermite_e").spec


@pytest.fixture
def hermite_env():
    return EvalEnv({"inv_2p": 0.25, "PA_x": 0.3, "PB_x": -0.2})

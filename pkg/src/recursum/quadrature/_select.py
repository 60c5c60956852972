"""Pick the compiled core when it is importable, else the pure-Python one.

Set ``RECURSUM_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _core_py


def select_core():
    if os.environ.get("RECURSUM_PURE_PYTHON", "") not in ("", "0"):
        return _core_py
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        return _core_py
    return _core


core = select_core()

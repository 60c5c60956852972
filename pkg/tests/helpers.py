"""Independent numerical oracles shared by the test modules."""

from __future__ import annotations

import math


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, rel: bool = True, max_depth: int = 60) -> float:
    """Adaptive Simpson with Richardson correction; explicit stack, no recursion.

    With ``rel`` the tolerance is relative to a coarse estimate of the integral.
    """
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    if rel:
        coarse = abs(sum((b - a) / 64 * f(a + (k + 0.5) * (b - a) / 64) for k in range(64)))
        tol = tol * max(coarse, 1e-300)
    parts = []
    stack = [(a, fa, b, fb, m, fm, whole, tol, 0)]
    while stack:
        a, fa, b, fb, m, fm, whole, eps, depth = stack.pop()
        lm, flm, left = _simpson(f, a, fa, m, fm)
        rm, frm, right = _simpson(f, m, fm, b, fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            parts.append(left + right + delta / 15.0)
        else:
            stack.append((a, fa, m, fm, lm, flm, left, eps / 2.0, depth + 1))
            stack.append((m, fm, b, fb, rm, frm, right, eps / 2.0, depth + 1))
    return math.fsum(parts)


def boys_simpson(m: int, T: float, tol: float = 1e-12) -> float:
    """F_m(T) = int_0^1 t^{2m} exp(-T t^2) dt."""
    return adaptive_simpson(lambda t: t ** (2 * m) * math.exp(-T * t * t), 0.0, 1.0, tol)


def legendre_moment(k: int) -> float:
    """int_{-1}^{1} x^k dx."""
    return 0.0 if k % 2 else 2.0 / (k + 1)

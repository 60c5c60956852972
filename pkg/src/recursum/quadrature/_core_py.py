"""Pure-Python hot kernels. ``_core.pyx`` mirrors these line for line.

Inputs are assumed validated by the public API layer.
"""

from __future__ import annotations

import math

BOYS_SEAM = 30.0
SERIES_TERMS = 200
_RESCALE = 1e250

IMPLEMENTATION = "python"


def boys_series_top(m: int, T: float) -> float:
    """Ascending series e^{-T} sum_k (2T)^k / ((2m+1)(2m+3)...(2m+2k+1))."""
    term = 1.0 / (2 * m + 1)
    total = term
    for k in range(1, SERIES_TERMS):
        term *= 2.0 * T / (2 * m + 2 * k + 1)
        total += term
        if term < 1e-16 * total:
            break
    return math.exp(-T) * total


def boys_asymptotic(m: int, T: float) -> float:
    """(2m-1)!! / 2^{m+1} * sqrt(pi / T^{2m+1})."""
    dfact = 1.0
    for q in range(1, 2 * m, 2):
        dfact *= q
    return dfact / 2.0 ** (m + 1) * math.sqrt(math.pi / T ** (2 * m + 1))


def boys_eval(m_max: int, T: float) -> list[float]:
    F = [0.0] * (m_max + 1)
    e = math.exp(-T)
    if T < BOYS_SEAM:
        F[m_max] = boys_series_top(m_max, T)
        for m in range(m_max - 1, -1, -1):
            F[m] = (2.0 * T * F[m + 1] + e) / (2 * m + 1)
        return F
    # large T: asymptotic F_0, stepped upward while that direction is stable,
    # series top plus downward steps above that
    m_up = min(m_max, int(T - 0.5))
    F[0] = boys_asymptotic(0, T)
    inv_2T = 0.5 / T
    for m in range(1, m_up + 1):
        F[m] = ((2 * m - 1) * F[m - 1] - e) * inv_2T
    if m_up < m_max:
        F[m_max] = boys_series_top(m_max, T)
        for m in range(m_max - 1, m_up, -1):
            F[m] = (2.0 * T * F[m + 1] + e) / (2 * m + 1)
    return F


def clenshaw_sum(c: list[float], x: float) -> float:
    b1 = 0.0
    b2 = 0.0
    for k in range(len(c) - 1, 0, -1):
        b1, b2 = 2.0 * x * b1 - b2 + c[k], b1
    return 0.5 * c[0] + x * b1 - b2


def miller_bessel_i(n_max: int, x: float, pad: int, scaled: bool = False) -> list[float]:
    top = n_max + pad
    inv_x = 1.0 / x
    f = [0.0] * (top + 2)
    f[top] = 1.0
    for n in range(top, 0, -1):
        f[n - 1] = f[n + 1] + (2 * n + 1) * inv_x * f[n]
        if abs(f[n - 1]) > _RESCALE:
            for q in range(n - 1, top + 1):
                f[q] /= _RESCALE
    # b_0 = e^{-x} sinh(x) / x without overflow
    norm = -math.expm1(-2.0 * x) / (2.0 * x) if scaled else math.sinh(x) / x
    scale = norm / f[0]
    return [f[n] * scale for n in range(n_max + 1)]


def tridiag_ql(diag: list[float], offdiag: list[float], max_iter: int):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    Returns ``(eigenvalues, first_components, converged)``, eigenvalues
    unsorted. Only the first row of the eigenvector matrix is accumulated.
    """
    n = len(diag)
    d = list(diag)
    e = list(offdiag) + [0.0]
    z = [0.0] * n
    z[0] = 1.0
    iters = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 1e-300 or abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            iters += 1
            if iters > max_iter:
                return d, z, False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, z, True

"""Independent evaluators for the built-in recurrences.

Each oracle takes the point as an index mapping plus an ``EvalEnv`` and never
touches the recurrence itself: closed forms, exact rational sums, or
convergent series.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..interp import EvalEnv


def _frac(x: float) -> Fraction:
    return Fraction(x)


# --------------------------------------------------------------------------
# orthogonal polynomials (exact rational arithmetic on the float input)
# --------------------------------------------------------------------------

def chebyshev(p: dict, env: EvalEnv) -> float:
    x = env.scalars["x"]
    return math.cos(p["n"] * math.acos(max(-1.0, min(1.0, x))))


def legendre(p: dict, env: EvalEnv) -> float:
    n, x = p["n"], _frac(env.scalars["x"])
    total = sum(math.comb(n, k) ** 2 * (x - 1) ** (n - k) * (x + 1) ** k for k in range(n + 1))
    return float(total / 2**n)


def hermite_h(p: dict, env: EvalEnv) -> float:
    n, x = p["n"], _frac(env.scalars["x"])
    total = sum(
        Fraction((-1) ** m * math.factorial(n), math.factorial(m) * math.factorial(n - 2 * m))
        * (2 * x) ** (n - 2 * m)
        for m in range(n // 2 + 1)
    )
    return float(total)


def _gbinom(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


def laguerre(p: dict, env: EvalEnv) -> float:
    n = p["n"]
    x, alpha = _frac(env.scalars["x"]), _frac(env.scalars["alpha"])
    total = sum(
        (-1) ** k * _gbinom(n + alpha, n - k) * x**k / math.factorial(k) for k in range(n + 1)
    )
    return float(total)


def clenshaw(p: dict, env: EvalEnv) -> float:
    """b_k = sum_{j >= k} c_j U_{j-k}(x), with U the second-kind Chebyshev polynomials."""
    k, x, c = p["k"], _frac(env.scalars["x"]), env.sequences["c"]
    u = [Fraction(1), 2 * x]
    while len(u) < len(c) + 2:
        u.append(2 * x * u[-1] - u[-2])
    return float(sum((_frac(c[j]) * u[j - k] for j in range(k, len(c))), Fraction(0)))


# --------------------------------------------------------------------------
# Hermite expansion coefficients
# --------------------------------------------------------------------------

def hermite_e(p: dict, env: EvalEnv) -> float:
    """Coefficient of Lambda_t in (X + PA)^i (X + PB)^j.

    Monomials convert through x^k = sum_s k!/(2^s s! (k-2s)!) a^(k-s) Lambda_{k-2s}
    with a = 1/(2p), the scaled probabilists' Hermite expansion.
    """
    i, j, t = p["i"], p["j"], p["t"]
    a = _frac(env.scalars["inv_2p"])
    pa, pb = _frac(env.scalars["PA_x"]), _frac(env.scalars["PB_x"])
    total = Fraction(0)
    for r in range(i + 1):
        for q in range(j + 1):
            k = r + q
            if k < t or (k - t) % 2:
                continue
            s = (k - t) // 2
            mono = math.comb(i, r) * math.comb(j, q) * pa ** (i - r) * pb ** (j - q)
            ladder = Fraction(math.factorial(k), 2**s * math.factorial(s) * math.factorial(t))
            total += mono * ladder * a ** (k - s)
    return float(total)


# --------------------------------------------------------------------------
# Boys function
# --------------------------------------------------------------------------

def boys_series(m: int, T: float) -> float:
    """F_m(T) = e^{-T} sum_k (2T)^k / ((2m+1)(2m+3)...(2m+2k+1)); all terms positive."""
    term = 1.0 / (2 * m + 1)
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= 2.0 * T / (2 * m + 2 * k + 1)
        terms.append(term)
        if term < 1e-17 * terms[0] and 2.0 * T < 2 * m + 2 * k + 1:
            break
        if k > 10_000:
            break
    return math.exp(-T) * math.fsum(terms)


def boys(p: dict, env: EvalEnv) -> float:
    return boys_series(p["m"], env.scalars["T"])


# --------------------------------------------------------------------------
# modified spherical Bessel functions
# --------------------------------------------------------------------------

def i_series(n: int, x: float) -> float:
    """i_n(x) = x^n sum_k (x^2/2)^k / (k! (2n+2k+1)!!)."""
    dfact = 1.0
    for q in range(1, 2 * n + 2, 2):
        dfact *= q
    term = x**n / dfact
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= (x * x / 2.0) / (k * (2 * n + 2 * k + 1))
        terms.append(term)
        if term < 1e-18 * terms[0] and k > x:
            break
    return math.fsum(terms)


def a_finite(n: int, x: float) -> float:
    """a_n(x) = (pi / 2x) sum_{k<=n} (n+k)! / (k! (n-k)!) (2x)^{-k}, exact finite sum."""
    s = math.fsum(
        math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k)) * (2.0 * x) ** (-k)
        for k in range(n + 1)
    )
    return math.pi / (2.0 * x) * s


def bessel_i(p: dict, env: EvalEnv) -> float:
    return i_series(p["n"], 1.0 / env.scalars["inv_x"])


def bessel_b(p: dict, env: EvalEnv) -> float:
    x = 1.0 / env.scalars["inv_x"]
    return math.exp(-x) * i_series(p["n"], x)


def bessel_a(p: dict, env: EvalEnv) -> float:
    return a_finite(p["n"], 1.0 / env.scalars["inv_x"])


def bessel_k(p: dict, env: EvalEnv) -> float:
    x = 1.0 / env.scalars["inv_x"]
    return math.exp(-x) * a_finite(p["n"], x)


def bessel_pair(name: str, x: float) -> tuple[float, float]:
    """Exact order-0 and order-1 seeds for the Bessel-type builtins."""
    if name == "bessel_i":
        return i_series(0, x), i_series(1, x)
    if name == "bessel_b_scaled":
        return math.exp(-x) * i_series(0, x), math.exp(-x) * i_series(1, x)
    if name == "bessel_k":
        return math.exp(-x) * a_finite(0, x), math.exp(-x) * a_finite(1, x)
    if name == "bessel_a_scaled":
        return a_finite(0, x), a_finite(1, x)
    raise KeyError(name)


# --------------------------------------------------------------------------
# combinatorics and Rys coefficients
# --------------------------------------------------------------------------

def binomial(p: dict, env: EvalEnv) -> float:
    n, k = p["n"], p["k"]
    return float(math.factorial(n) // (math.factorial(k) * math.factorial(n - k)))


def fibonacci(p: dict, env: EvalEnv) -> float:
    a, b = env.scalars["f0"], env.scalars["f1"]
    for _ in range(p["n"]):
        a, b = b, a + b
    return a


def rys_alpha(p: dict, env: EvalEnv) -> float:
    F = env.sequences["F"]
    k = p["k"]
    return float(Fraction(F[k + 1]) / Fraction(F[k]))

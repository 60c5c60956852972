"""Numerical pipelines over the recurrence kernels.

Boys hybrid evaluation, Clenshaw summation, Miller's backward Bessel
algorithm, Rys recurrence coefficients and Golub-Welsch rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from ..errors import DivisionByZero, DomainError, NegativeUnderRoot, NoConvergence
from ._select import core as _default_core

BOYS_M_MAX = 64
MILLER_N_MAX = 40


def miller_pad(x: float) -> int:
    """Extra orders above ``n_max`` where the backward sweep starts."""
    return max(15, math.ceil(x))


def boys_eval(m_max: int, T: float, *, core=None) -> list[float]:
    """F_0(T) .. F_{m_max}(T).

    Below T = 30 the top order comes from the ascending series and lower
    orders from the stable downward step F_m = (2T F_{m+1} + e^{-T}) / (2m+1).
    From T = 30 on, F_0 takes the asymptotic form and higher orders step
    upward while 2m + 1 < 2T (the stable direction there).
    """
    if not isinstance(m_max, int) or not 0 <= m_max <= BOYS_M_MAX:
        raise DomainError(f"m_max must be an int in [0, {BOYS_M_MAX}], got {m_max!r}")
    if not math.isfinite(T) or T < 0.0:
        raise DomainError(f"Boys argument must be finite and >= 0, got {T!r}")
    return (core or _default_core).boys_eval(m_max, float(T))


def clenshaw_sum(c: Sequence[float], x: float, *, core=None) -> float:
    """c_0/2 + sum_{k>=1} c_k T_k(x) by the backward Clenshaw sweep."""
    if len(c) == 0:
        raise DomainError("need at least one coefficient")
    return (core or _default_core).clenshaw_sum([float(v) for v in c], float(x))


def miller_bessel_i(n_max: int, x: float, *, scaled: bool = False, core=None) -> list[float]:
    """i_0(x) .. i_{n_max}(x) by backward recursion normalized to sinh(x)/x.

    With ``scaled`` the result is b_n = e^{-x} i_n, normalized to
    (1 - e^{-2x}) / 2x, which stays finite for large x.
    """
    if not isinstance(n_max, int) or not 0 <= n_max <= MILLER_N_MAX:
        raise DomainError(f"n_max must be an int in [0, {MILLER_N_MAX}], got {n_max!r}")
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"x must be finite and > 0, got {x!r}")
    return (core or _default_core).miller_bessel_i(n_max, float(x), miller_pad(x), bool(scaled))


def rys_coeffs(F: Sequence[float]) -> tuple[list[float], list[float]]:
    """alpha_k = F_{k+1}/F_k and beta_k = (F_k F_{k+2} - F_{k+1}^2) / F_k^2."""
    if len(F) < 3:
        raise DomainError("need at least three moments")
    for k, v in enumerate(F[:-1]):
        if v == 0.0:
            raise DivisionByZero(f"F[{k}] is zero")
    alpha = [F[k + 1] / F[k] for k in range(len(F) - 1)]
    beta = [(F[k] * F[k + 2] - F[k + 1] ** 2) / F[k] ** 2 for k in range(len(F) - 2)]
    return alpha, beta


@dataclass(frozen=True)
class TridiagSym:
    """Symmetric tridiagonal matrix by its diagonal and (non-negative) off-diagonal."""

    diag: tuple[float, ...]
    offdiag: tuple[float, ...]

    def __post_init__(self):
        diag = tuple(float(v) for v in self.diag)
        off = tuple(abs(float(v)) for v in self.offdiag)
        if not diag:
            raise DomainError("empty matrix")
        if len(off) != len(diag) - 1:
            raise DomainError(f"offdiag must have {len(diag) - 1} entries, got {len(off)}")
        if not all(math.isfinite(v) for v in diag + off):
            raise DomainError("matrix entries must be finite")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def size(self) -> int:
        return len(self.diag)

    def norm(self) -> float:
        """Frobenius norm."""
        return math.sqrt(sum(v * v for v in self.diag) + 2.0 * sum(v * v for v in self.offdiag))

    def matvec(self, v: Sequence[float]) -> list[float]:
        n = self.size
        out = [self.diag[i] * v[i] for i in range(n)]
        for i in range(n - 1):
            out[i] += self.offdiag[i] * v[i + 1]
            out[i + 1] += self.offdiag[i] * v[i]
        return out


@dataclass(frozen=True)
class QuadRule:
    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    mu0: float

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise DomainError("nodes and weights differ in length")

    def integrate(self, f: Callable[[float], float]) -> float:
        return math.fsum(w * f(x) for x, w in zip(self.nodes, self.weights))

    def to_csv(self) -> str:
        return "".join(f"{x:.17g},{w:.17g}\n" for x, w in zip(self.nodes, self.weights))


def jacobi_matrix(
    A: Callable[[int], float],
    B: Callable[[int], float],
    C: Callable[[int], float],
    size: int,
) -> TridiagSym:
    """Jacobi matrix of p_n = (A_n x + B_n) p_{n-1} - C_n p_{n-2}, n from 1."""
    if size < 1:
        raise DomainError("size must be >= 1")
    a = [float(A(n)) for n in range(1, size + 1)]
    for n, v in enumerate(a, start=1):
        if v == 0.0:
            raise DivisionByZero(f"A({n}) is zero")
    diag = [-float(B(n)) / a[n - 1] + 0.0 for n in range(1, size + 1)]
    off = []
    for n in range(1, size):
        ratio = float(C(n + 1)) / (a[n - 1] * a[n])
        if ratio < 0.0:
            raise NegativeUnderRoot(f"C({n + 1}) / (A({n}) A({n + 1})) = {ratio} is negative")
        off.append(math.sqrt(ratio))
    return TridiagSym(tuple(diag), tuple(off))


def tridiag_eigen(m: TridiagSym, *, core=None) -> tuple[list[float], list[float]]:
    """Eigenvalues (ascending) and first eigenvector components by implicit-shift QL."""
    d, z, ok = (core or _default_core).tridiag_ql(list(m.diag), list(m.offdiag), 30 * m.size)
    if not ok:
        raise NoConvergence(f"QL did not converge within {30 * m.size} iterations")
    order = sorted(range(m.size), key=lambda i: d[i])
    return [d[i] for i in order], [z[i] for i in order]


def golub_welsch(m: TridiagSym, mu0: float, *, core=None) -> QuadRule:
    """Nodes are the eigenvalues; weights are mu0 times squared first components."""
    if not mu0 > 0.0:
        raise DomainError(f"mu0 must be > 0, got {mu0!r}")
    nodes, first = tridiag_eigen(m, core=core)
    return QuadRule(tuple(nodes), tuple(mu0 * v * v for v in first), float(mu0))


def legendre_matrix(size: int) -> TridiagSym:
    """Jacobi matrix for Legendre polynomials (weight 1 on [-1, 1], mu0 = 2)."""
    return jacobi_matrix(lambda n: (2 * n - 1) / n, lambda n: 0.0, lambda n: (n - 1) / n, size)

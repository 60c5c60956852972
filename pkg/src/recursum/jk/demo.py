"""Toy J and K matrix builds on generated Hermite E and Coulomb R kernels.

Primitives are single uncontracted s or p Gaussians with unit normalization.
Every electron repulsion integral is

    (ab|cd) = 2 pi^{5/2} / (p q sqrt(p + q)) * sum_{t,u} E_t^{ab} E_u^{cd} (-1)^{|u|} R_{t+u}

with E_t = E_tx E_ty E_tz (each carrying its pair's Gaussian-product factor)
and R evaluated at P - Q with the reduced exponent pq / (p + q).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from ..codegen import Bounds, generate, load
from ..errors import DimensionMismatch, DomainError
from ..interp import EvalEnv, eval_layer, evaluate
from ..library import builtin
from ..quadrature import boys_eval

Vec3 = tuple[float, float, float]
Matrix = list[list[float]]

CARTESIAN = {0: [(0, 0, 0)], 1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}
R_ORDER = 4  # t + u + v reached by (pp|pp)


@dataclass(frozen=True)
class Shell:
    center: Vec3
    l: int
    exponent: float

    def __post_init__(self):
        if self.l not in CARTESIAN:
            raise DomainError(f"only s and p shells are supported, got l={self.l}")
        if not self.exponent > 0.0:
            raise DomainError(f"exponent must be > 0, got {self.exponent}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def functions(self) -> list[tuple[int, int, int]]:
        return CARTESIAN[self.l]


@dataclass(frozen=True)
class ToySystem:
    shells: tuple[Shell, ...]

    def __post_init__(self):
        object.__setattr__(self, "shells", tuple(self.shells))
        if not 1 <= len(self.shells) <= 4:
            raise DomainError("a toy system holds 1 to 4 shells")

    @property
    def n_basis(self) -> int:
        return sum(len(s.functions) for s in self.shells)

    @property
    def offsets(self) -> list[int]:
        out, k = [], 0
        for s in self.shells:
            out.append(k)
            k += len(s.functions)
        return out

    @classmethod
    def parse(cls, text: str) -> "ToySystem":
        """One shell per line: ``x y z l exponent``; ``#`` starts a comment."""
        shells = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise DomainError(f"line {lineno}: expected 'x y z l exponent'")
            x, y, z, l, a = parts
            shells.append(Shell((float(x), float(y), float(z)), int(l), float(a)))
        return cls(tuple(shells))


def random_system(rng: random.Random, n_shells: int | None = None) -> ToySystem:
    n = n_shells if n_shells is not None else rng.randint(2, 4)
    return ToySystem(
        tuple(
            Shell(
                tuple(rng.uniform(-1.5, 1.5) for _ in range(3)),
                rng.randint(0, 1),
                rng.uniform(0.3, 2.0),
            )
            for _ in range(n)
        )
    )


def random_density(rng: random.Random, n: int) -> Matrix:
    D = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            D[i][j] = D[j][i] = rng.uniform(-1.0, 1.0)
    return D


def gaussian_product(A: Sequence[float], a: float, B: Sequence[float], b: float):
    """Return ``(P, p, Kab)`` for the product of exp(-a|r-A|^2) and exp(-b|r-B|^2)."""
    p = a + b
    P = tuple((a * A[k] + b * B[k]) / p for k in range(3))
    r2 = sum((A[k] - B[k]) ** 2 for k in range(3))
    return P, p, math.exp(-(a * b / p) * r2)


def eri_prefactor(p: float, q: float) -> float:
    return 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))


# --------------------------------------------------------------------------
# E and R providers
# --------------------------------------------------------------------------

class KernelSource:
    """Hermite E layers and Coulomb R tables from generated kernels."""

    def __init__(self, profile: str | None = None, r_backend: str = "unrolled"):
        self.profile = profile
        self.r_backend = r_backend
        e_spec = builtin("hermite_e").spec
        self.e_kernels = load(generate(e_spec, "layered", Bounds.level(e_spec, 2), profile))
        r_spec = builtin("coulomb_R").spec
        if r_backend == "runtime":
            self.r_kernels = load(generate(r_spec, "runtime", None, profile))
        else:
            bounds = Bounds.of({i: R_ORDER for i in r_spec.indices}, [(("t", "u", "v"), R_ORDER)])
            self.r_kernels = load(generate(r_spec, "unrolled", bounds, profile))

    def e_layer(self, i: int, j: int, inv_2p: float, pa: float, pb: float) -> list[float]:
        env = EvalEnv({"inv_2p": inv_2p, "PA_x": pa, "PB_x": pb})
        return self.e_kernels.layer((i, j), env)

    def r_values(self, order: int, pq: Vec3, fm: list[float]) -> dict:
        env = EvalEnv(dict(zip("XYZ", pq)), {"Fm": fm})
        out = {}
        for t, u, v in _hermite_triples(order):
            if self.r_backend == "runtime":
                limits = (order, order, order, order)
                out[(t, u, v)] = self.r_kernels.runtime((t, u, v, 0), env, limits)
            else:
                out[(t, u, v)] = self.r_kernels.point((t, u, v, 0), env)
        return out


class InterpreterSource:
    """Same contract as ``KernelSource``, evaluated by the reference interpreter."""

    def __init__(self):
        self.e_spec = builtin("hermite_e").spec
        self.r_spec = builtin("coulomb_R").spec

    def e_layer(self, i, j, inv_2p, pa, pb):
        return eval_layer(self.e_spec, (i, j), EvalEnv({"inv_2p": inv_2p, "PA_x": pa, "PB_x": pb}))

    def r_values(self, order, pq, fm):
        env = EvalEnv(dict(zip("XYZ", pq)), {"Fm": fm})
        return {(t, u, v): evaluate(self.r_spec, (t, u, v, 0), env) for t, u, v in _hermite_triples(order)}


@lru_cache(maxsize=None)
def default_source(profile: str | None = None) -> KernelSource:
    return KernelSource(profile)


def _hermite_triples(order: int):
    return [(t, u, v) for t, u, v in itertools.product(range(order + 1), repeat=3) if t + u + v <= order]


# --------------------------------------------------------------------------
# pair data
# --------------------------------------------------------------------------

@dataclass
class PairData:
    center: Vec3
    exponent: float
    L: int
    # (function index a, function index b) -> {(tx, ty, tz): E}
    E: dict


def pair_data(source, sa: Shell, sb: Shell) -> PairData:
    P, p, kab = gaussian_product(sa.center, sa.exponent, sb.center, sb.exponent)
    layers = {}
    for k in range(3):
        pa, pb = P[k] - sa.center[k], P[k] - sb.center[k]
        for i in range(sa.l + 1):
            for j in range(sb.l + 1):
                layers[k, i, j] = source.e_layer(i, j, 0.5 / p, pa, pb)
    E = {}
    for fa, ca in enumerate(sa.functions):
        for fb, cb in enumerate(sb.functions):
            coeffs = {}
            ranges = [range(ca[k] + cb[k] + 1) for k in range(3)]
            for t in itertools.product(*ranges):
                coeffs[t] = kab * math.prod(layers[k, ca[k], cb[k]][t[k]] for k in range(3))
            E[fa, fb] = coeffs
    return PairData(P, p, sa.l + sb.l, E)


def coulomb_table(source, bra: PairData, ket: PairData) -> dict:
    """Prefactor times R_{tuv}^{(0)}(P - Q) for t + u + v up to the quartet's order."""
    p, q = bra.exponent, ket.exponent
    alpha = p * q / (p + q)
    pq = tuple(bra.center[k] - ket.center[k] for k in range(3))
    T = alpha * sum(c * c for c in pq)
    order = bra.L + ket.L
    F = boys_eval(order, T)
    fm = [(-2.0 * alpha) ** m * F[m] for m in range(order + 1)]
    pref = eri_prefactor(p, q)
    return {k: pref * v for k, v in source.r_values(order, pq, fm).items()}


def hermite_phase(u) -> float:
    return -1.0 if sum(u) % 2 else 1.0


def _check(sys: ToySystem, D: Matrix) -> int:
    n = sys.n_basis
    if len(D) != n or any(len(row) != n for row in D):
        raise DimensionMismatch(f"density must be {n}x{n}")
    return n


def _zeros(n: int) -> Matrix:
    return [[0.0] * n for _ in range(n)]


def _pairs(sys: ToySystem, source):
    return {
        (a, b): pair_data(source, sys.shells[a], sys.shells[b])
        for a in range(len(sys.shells))
        for b in range(len(sys.shells))
    }


# --------------------------------------------------------------------------
# phased builders
# --------------------------------------------------------------------------

def build_J(sys: ToySystem, D: Matrix, source=None, phase: Callable = hermite_phase) -> Matrix:
    """Coulomb matrix by Hermite density, Hermite potential, then contraction."""
    n = _check(sys, D)
    source = source or default_source()
    off = sys.offsets
    pairs = _pairs(sys, source)
    J = _zeros(n)

    # phase 1: Hermite density per ket pair
    densities = []
    for (c, d), ket in pairs.items():
        Du: dict = {}
        for (fl, fs), coeffs in ket.E.items():
            dls = D[off[c] + fl][off[d] + fs]
            for u, e in coeffs.items():
                Du[u] = Du.get(u, 0.0) + dls * e * phase(u)
        densities.append((ket, Du))

    for (a, b), bra in pairs.items():
        # phase 2: Hermite potential at P
        V: dict = {}
        for ket, Du in densities:
            R = coulomb_table(source, bra, ket)
            for t in itertools.product(range(bra.L + 1), repeat=3):
                if sum(t) > bra.L:
                    continue
                acc = 0.0
                for u, du in Du.items():
                    acc += du * R[t[0] + u[0], t[1] + u[1], t[2] + u[2]]
                V[t] = V.get(t, 0.0) + acc
        # phase 3: contract to J
        for (fm, fn), coeffs in bra.E.items():
            J[off[a] + fm][off[b] + fn] += sum(e * V[t] for t, e in coeffs.items())
    return J


def build_K(sys: ToySystem, D: Matrix, source=None, phase: Callable = hermite_phase) -> Matrix:
    """Exchange matrix: K_{mu nu} = sum D_{lambda sigma} (mu lambda | nu sigma).

    Shell pairs (A, C) and (B, D) are looped with mu in A, lambda in C,
    nu in B, sigma in D; pair data and R tables are hoisted per quartet.
    """
    n = _check(sys, D)
    source = source or default_source()
    off = sys.offsets
    pairs = _pairs(sys, source)
    K = _zeros(n)
    for (a, c), bra in pairs.items():
        for (b, d), ket in pairs.items():
            R = coulomb_table(source, bra, ket)
            for (fm, fl), e_bra in bra.E.items():
                for (fn, fs), e_ket in ket.E.items():
                    acc = 0.0
                    for t, et in e_bra.items():
                        for u, eu in e_ket.items():
                            acc += et * eu * phase(u) * R[t[0] + u[0], t[1] + u[1], t[2] + u[2]]
                    K[off[a] + fm][off[b] + fn] += D[off[c] + fl][off[d] + fs] * acc
    return K


# --------------------------------------------------------------------------
# naive oracle
# --------------------------------------------------------------------------

def eri_tensor(sys: ToySystem, source=None) -> list:
    """Full (mu nu | lambda sigma) tensor by an explicit four-index loop."""
    source = source or default_source()
    n = sys.n_basis
    off = sys.offsets
    pairs = _pairs(sys, source)
    G = [[[[0.0] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for (a, b), bra in pairs.items():
        for (c, d), ket in pairs.items():
            R = coulomb_table(source, bra, ket)
            for (fm, fn), e_bra in bra.E.items():
                for (fl, fs), e_ket in ket.E.items():
                    total = 0.0
                    for t, et in e_bra.items():
                        for u, eu in e_ket.items():
                            total += et * eu * hermite_phase(u) * R[t[0] + u[0], t[1] + u[1], t[2] + u[2]]
                    G[off[a] + fm][off[b] + fn][off[c] + fl][off[d] + fs] = total
    return G


def naive_JK(sys: ToySystem, D: Matrix, source=None) -> tuple[Matrix, Matrix]:
    n = _check(sys, D)
    G = eri_tensor(sys, source)
    J, K = _zeros(n), _zeros(n)
    for m in range(n):
        for v in range(n):
            J[m][v] = math.fsum(D[l][s] * G[m][v][l][s] for l in range(n) for s in range(n))
            K[m][v] = math.fsum(D[l][s] * G[m][l][v][s] for l in range(n) for s in range(n))
    return J, K


# --------------------------------------------------------------------------
# matrix helpers
# --------------------------------------------------------------------------

def frobenius(M: Matrix) -> float:
    return math.sqrt(sum(x * x for row in M for x in row))


def rel_frobenius(A: Matrix, B: Matrix) -> float:
    """||A - B||_F / max(||B||_F, tiny)."""
    diff = [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
    return frobenius(diff) / max(frobenius(B), 1e-300)


def asymmetry(M: Matrix) -> float:
    n = len(M)
    return max((abs(M[i][j] - M[j][i]) for i in range(n) for j in range(n)), default=0.0)


@dataclass
class DemoResult:
    J: Matrix
    K: Matrix
    J_naive: Matrix
    K_naive: Matrix

    @property
    def max_deviation(self) -> float:
        return max(
            abs(x - y)
            for A, B in ((self.J, self.J_naive), (self.K, self.K_naive))
            for ra, rb in zip(A, B)
            for x, y in zip(ra, rb)
        )

    def to_json(self) -> dict:
        return {
            "J": self.J,
            "K": self.K,
            "J_naive": self.J_naive,
            "K_naive": self.K_naive,
            "max_deviation": self.max_deviation,
        }


def run_demo(sys: ToySystem, D: Matrix, source=None) -> DemoResult:
    source = source or default_source()
    J = build_J(sys, D, source)
    K = build_K(sys, D, source)
    Jn, Kn = naive_JK(sys, D, source)
    return DemoResult(J, K, Jn, Kn)

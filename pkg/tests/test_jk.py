from __future__ import annotations

import json
import math
import random

import pytest

from recursum.errors import DimensionMismatch, DomainError
from recursum.jk import (
    InterpreterSource,
    KernelSource,
    Shell,
    ToySystem,
    asymmetry,
    build_J,
    build_K,
    eri_prefactor,
    eri_tensor,
    gaussian_product,
    naive_JK,
    random_density,
    random_system,
    rel_frobenius,
    run_demo,
)

SS_SELF = 2.0 * math.pi**2.5 / (2.0 * 2.0 * math.sqrt(4.0))  # F_0(0) = 1


def _ssss(A, a, B, b, C, c, D, d):
    """Closed-form (ss|ss) over four primitive s Gaussians."""
    P, p, kab = gaussian_product(A, a, B, b)
    Q, q, kcd = gaussian_product(C, c, D, d)
    T = p * q / (p + q) * sum((P[k] - Q[k]) ** 2 for k in range(3))
    F0 = 1.0 if T < 1e-14 else 0.5 * math.sqrt(math.pi / T) * math.erf(math.sqrt(T))
    return eri_prefactor(p, q) * kab * kcd * F0


def test_gaussian_product_examples():
    P, p, K = gaussian_product((0.1, 0.2, 0.3), 0.7, (0.1, 0.2, 0.3), 1.3)
    assert P == pytest.approx((0.1, 0.2, 0.3), abs=1e-15) and p == 2.0 and K == 1.0
    P, _, _ = gaussian_product((0.0, 0.0, 0.0), 1.5, (1.0, -2.0, 4.0), 1.5)
    assert P == pytest.approx((0.5, -1.0, 2.0), abs=1e-15)
    P, p, K = gaussian_product((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 3.0), 2.0)
    assert P == pytest.approx((0.0, 0.0, 2.0), abs=1e-15)
    assert p == 3.0
    assert K == pytest.approx(math.exp(-6.0), rel=1e-15)


def test_single_s_shell_closed_form():
    sys = ToySystem((Shell((0.0, 0.0, 0.0), 0, 1.0),))
    J, K = build_J(sys, [[1.0]]), build_K(sys, [[1.0]])
    assert J[0][0] == pytest.approx(SS_SELF, rel=1e-14)
    assert K[0][0] == pytest.approx(J[0][0], rel=1e-15)
    assert SS_SELF == pytest.approx(4.3733545819, rel=1e-10)
    Jn, Kn = naive_JK(sys, [[1.0]])
    assert Jn[0][0] == pytest.approx(SS_SELF, rel=1e-14)


def test_two_identical_s_shells():
    s = Shell((0.3, -0.2, 0.5), 0, 0.9)
    sys = ToySystem((s, s))
    D = [[1.0, 0.0], [0.0, 1.0]]
    J, K = build_J(sys, D), build_K(sys, D)
    Jn, Kn = naive_JK(sys, D)
    assert asymmetry(J) <= 1e-12 and asymmetry(K) <= 1e-12
    assert rel_frobenius(J, Jn) <= 1e-10
    assert rel_frobenius(K, Kn) <= 1e-10


def test_s_integrals_match_closed_form():
    rng = random.Random(3)
    sys = random_system(rng, 3)
    sys = ToySystem(tuple(Shell(s.center, 0, s.exponent) for s in sys.shells))
    G = eri_tensor(sys)
    sh = sys.shells
    for a, b, c, d in [(0, 1, 2, 0), (1, 1, 2, 2), (0, 2, 1, 2)]:
        ref = _ssss(sh[a].center, sh[a].exponent, sh[b].center, sh[b].exponent,
                    sh[c].center, sh[c].exponent, sh[d].center, sh[d].exponent)
        assert G[a][b][c][d] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("axis", range(3))
def test_p_integrals_by_finite_difference(axis):
    # (x - A_x) e^{-a|r-A|^2} = (1/2a) d/dA_x e^{-a|r-A|^2}
    A, a = (0.2, -0.4, 0.1), 0.8
    B, b = (-0.5, 0.3, 0.6), 1.1
    C, c = (0.9, 0.2, -0.7), 0.6
    sys = ToySystem((Shell(A, 1, a), Shell(B, 0, b), Shell(C, 0, c)))
    G = eri_tensor(sys)
    h = 1e-5

    def shifted(sign):
        Ah = list(A)
        Ah[axis] += sign * h
        return _ssss(Ah, a, B, b, C, c, C, c)

    fd = (shifted(+1) - shifted(-1)) / (2 * h) / (2 * a)
    assert G[axis][3][4][4] == pytest.approx(fd, rel=1e-7, abs=1e-10)


def test_eri_eightfold_symmetry():
    sys = random_system(random.Random(8), 2)
    G = eri_tensor(sys)
    n = sys.n_basis
    for m in range(n):
        for v in range(n):
            for l in range(n):
                for s in range(n):
                    g = G[m][v][l][s]
                    for other in (G[v][m][l][s], G[m][v][s][l], G[l][s][m][v], G[s][l][v][m]):
                        assert abs(g - other) <= 1e-12 * max(1.0, abs(g))


def test_zero_density():
    sys = random_system(random.Random(4), 3)
    Z = [[0.0] * sys.n_basis for _ in range(sys.n_basis)]
    assert all(v == 0.0 for row in build_J(sys, Z) for v in row)
    assert all(v == 0.0 for row in build_K(sys, Z) for v in row)
    Jn, Kn = naive_JK(sys, Z)
    assert all(v == 0.0 for M in (Jn, Kn) for row in M for v in row)


@pytest.mark.parametrize("seed", range(10))
def test_phased_builds_match_naive(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    D = random_density(rng, sys.n_basis)
    result = run_demo(sys, D)
    assert rel_frobenius(result.J, result.J_naive) <= 1e-10
    assert rel_frobenius(result.K, result.K_naive) <= 1e-10
    assert asymmetry(result.J) <= 1e-12
    assert asymmetry(result.K) <= 1e-12


def test_linearity():
    rng = random.Random(21)
    sys = random_system(rng, 3)
    D = random_density(rng, sys.n_basis)
    D2 = [[2.0 * v for v in row] for row in D]
    for build in (build_J, build_K):
        one, two = build(sys, D), build(sys, D2)
        for r1, r2 in zip(one, two):
            for x, y in zip(r1, r2):
                assert y == pytest.approx(2.0 * x, rel=1e-13, abs=1e-14)


def test_phase_mutation_is_detected():
    rng = random.Random(5)
    sys = ToySystem((Shell((0.0, 0.0, 0.0), 1, 0.9), Shell((0.4, -0.3, 0.8), 1, 1.3)))
    D = random_density(rng, sys.n_basis)
    J_naive, _ = naive_JK(sys, D)
    mutated = build_J(sys, D, phase=lambda u: 1.0)
    assert rel_frobenius(mutated, J_naive) > 1e-6
    assert rel_frobenius(build_J(sys, D), J_naive) <= 1e-10


@pytest.mark.parametrize("r_backend", ["unrolled", "runtime"])
def test_sources_agree(r_backend):
    rng = random.Random(9)
    sys = random_system(rng, 3)
    D = random_density(rng, sys.n_basis)
    J1 = build_J(sys, D, KernelSource("python", r_backend))
    J2 = build_J(sys, D, InterpreterSource())
    assert rel_frobenius(J1, J2) <= 1e-13


def test_dimension_mismatch():
    sys = random_system(random.Random(1), 2)
    with pytest.raises(DimensionMismatch):
        build_J(sys, [[1.0]])
    with pytest.raises(DimensionMismatch):
        naive_JK(sys, [[1.0]])


def test_shell_validation_and_parse():
    with pytest.raises(DomainError):
        Shell((0.0, 0.0, 0.0), 2, 1.0)
    with pytest.raises(DomainError):
        Shell((0.0, 0.0, 0.0), 0, -1.0)
    with pytest.raises(DomainError):
        ToySystem(())
    sys = ToySystem.parse("# toy\n0 0 0 0 1.0\n0 0 1.4 1 0.5  # p shell\n")
    assert sys.n_basis == 4 and sys.offsets == [0, 1]
    with pytest.raises(DomainError):
        ToySystem.parse("0 0 0 1\n")


def test_demo_json():
    rng = random.Random(0)
    sys = random_system(rng, 2)
    result = run_demo(sys, random_density(rng, sys.n_basis))
    payload = json.loads(json.dumps(result.to_json()))
    assert set(payload) == {"J", "K", "J_naive", "K_naive", "max_deviation"}
    assert payload["max_deviation"] == result.max_deviation

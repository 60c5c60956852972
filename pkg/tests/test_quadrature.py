from __future__ import annotations

import math

import pytest
from helpers import boys_simpson, legendre_moment
from hypothesis import given
from hypothesis import strategies as st

from recursum.errors import DivisionByZero, DomainError, NegativeUnderRoot, NoConvergence
from recursum.interp import EvalEnv, Evaluator
from recursum.library import builtin
from recursum.library.oracles import i_series
from recursum.quadrature import (
    IMPLEMENTATION,
    QuadRule,
    TridiagSym,
    _core_py,
    boys_eval,
    clenshaw_sum,
    golub_welsch,
    jacobi_matrix,
    legendre_matrix,
    miller_bessel_i,
    rys_coeffs,
    select_core,
    tridiag_eigen,
)

try:
    from recursum.quadrature import _core as _compiled
except ImportError:  # pragma: no cover - extension not built
    _compiled = None

CORES = [pytest.param(_core_py, id="python")]
if _compiled is not None:
    CORES.append(pytest.param(_compiled, id="cython"))

# adaptive Simpson (relative tolerance 1e-12), frozen from helpers.boys_simpson
BOYS_SIMPSON = {
    0.1: [0.9676433126355918, 0.31402947299816125, 0.18625500479262144, 0.13218802963573903, 0.10239394707106542, 0.08354052801814199, 0.07054195081798474, 0.06103971298914218, 0.05379138400581872],
    1.0: [0.746824132812427, 0.18947234582049233, 0.10026879814501737, 0.06673227477682234, 0.049623241133156824, 0.03936486451348465, 0.03256703423844268, 0.027746001964150564, 0.024155294145404335],
    5.0: [0.3957123096105135, 0.03889743626114281, 0.010995436178434294, 0.004823923389308603, 0.0027029516726074757, 0.0017588618054381914, 0.0012609532860734566, 0.000965444571986967, 0.000774372158071874],
    20.0: [0.19816636482997382, 0.0049541590692205005, 0.000371561878662697, 4.644518330399657e-05, 8.12785554935884e-06, 1.828715969765183e-06, 5.028453628448635e-07, 1.6337321408403326e-07, 6.121342644094707e-08],
    40.0: [0.14012478040995077, 0.001751559755124381, 6.568349081716382e-05, 4.1052181760726635e-06, 3.5920659040631135e-07, 4.041074142065625e-08, 5.556476945287424e-09, 9.029275035560515e-10, 1.6929890686365972e-10],
}


def _rel(a, b):
    return abs(a - b) / abs(b)


# --------------------------------------------------------------------------
# core selection
# --------------------------------------------------------------------------

def test_core_selection(monkeypatch):
    assert IMPLEMENTATION in ("python", "cython")
    monkeypatch.setenv("RECURSUM_PURE_PYTHON", "1")
    assert select_core().IMPLEMENTATION == "python"
    monkeypatch.delenv("RECURSUM_PURE_PYTHON")
    expected = "cython" if _compiled is not None else "python"
    assert select_core().IMPLEMENTATION == expected


def test_fallback_when_extension_missing(monkeypatch):
    import sys

    import recursum.quadrature as quad
    from recursum.quadrature import _select

    monkeypatch.setitem(sys.modules, "recursum.quadrature._core", None)
    monkeypatch.delattr(quad, "_core", raising=False)
    assert _select.select_core().IMPLEMENTATION == "python"


# --------------------------------------------------------------------------
# Boys
# --------------------------------------------------------------------------

@pytest.mark.parametrize("core", CORES)
def test_boys_examples(core):
    assert boys_eval(0, 0.0, core=core) == [1.0]
    assert boys_eval(0, 1.0, core=core)[0] == pytest.approx(0.7468241328, abs=1e-10)
    assert boys_eval(2, 0.0, core=core) == pytest.approx([1.0, 1.0 / 3.0, 0.2], abs=1e-16)


@pytest.mark.parametrize("core", CORES)
@pytest.mark.parametrize("T", sorted(BOYS_SIMPSON))
def test_boys_against_frozen_simpson(core, T):
    F = boys_eval(8, T, core=core)
    for m, ref in enumerate(BOYS_SIMPSON[T]):
        assert _rel(F[m], ref) <= 1e-9


def test_frozen_simpson_values_reproduce():
    for T, row in BOYS_SIMPSON.items():
        assert boys_simpson(3, T) == pytest.approx(row[3], rel=1e-12)


@pytest.mark.parametrize("core", CORES)
def test_boys_seam_branches_agree(core):
    # both regimes evaluated at the same T on either side of the seam
    for T in (29.999, 30.0, 30.001):
        e = math.exp(-T)
        series = [0.0] * 9
        series[8] = _core_py.boys_series_top(8, T)
        for m in range(7, -1, -1):
            series[m] = (2.0 * T * series[m + 1] + e) / (2 * m + 1)
        asym = [_core_py.boys_asymptotic(0, T)]
        for m in range(1, 9):
            asym.append(((2 * m - 1) * asym[-1] - e) * (0.5 / T))
        for m in range(9):
            assert _rel(asym[m], series[m]) <= 1e-9
    lo, hi = boys_eval(9, 29.999, core=core), boys_eval(9, 30.001, core=core)
    mid = boys_eval(10, 30.0, core=core)
    for m in range(9):
        # dF_m/dT = -F_{m+1}; the remainder is O(h^3)
        assert abs(lo[m] - hi[m] - 0.002 * mid[m + 1]) <= 1e-9


@pytest.mark.parametrize("core", CORES)
@given(st.integers(0, 64), st.floats(0.0, 200.0))
def test_boys_finite_positive(core, m_max, T):
    F = boys_eval(m_max, T, core=core)
    assert len(F) == m_max + 1
    assert all(math.isfinite(v) and v > 0.0 for v in F)


def test_boys_domain():
    with pytest.raises(DomainError):
        boys_eval(2, -1.0)
    with pytest.raises(DomainError):
        boys_eval(65, 1.0)


# --------------------------------------------------------------------------
# Clenshaw
# --------------------------------------------------------------------------

@pytest.mark.parametrize("core", CORES)
def test_clenshaw_examples(core):
    assert clenshaw_sum([2.0], 0.3, core=core) == 1.0
    assert clenshaw_sum([0.0, 1.0], 0.7, core=core) == pytest.approx(0.7, abs=1e-15)
    assert clenshaw_sum([0.0, 0.0, 1.0], 0.5, core=core) == pytest.approx(-0.5, abs=1e-15)
    with pytest.raises(DomainError):
        clenshaw_sum([], 0.5)


@given(
    st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=16),
    st.floats(-1.0, 1.0),
)
def test_clenshaw_matches_chebyshev_interpreter(c, x):
    cheb = Evaluator(builtin("chebyshev_T").spec, EvalEnv({"x": x}))
    direct = 0.5 * c[0] + sum(c[k] * cheb((k,)) for k in range(1, len(c)))
    scale = max(1.0, sum(abs(v) for v in c))
    assert abs(clenshaw_sum(c, x) - direct) <= 1e-12 * scale


# --------------------------------------------------------------------------
# Miller
# --------------------------------------------------------------------------

@pytest.mark.parametrize("core", CORES)
def test_miller_examples(core):
    assert miller_bessel_i(0, 1.0, core=core) == pytest.approx([math.sinh(1.0)], rel=1e-15)
    assert miller_bessel_i(2, 1.0, core=core)[2] == pytest.approx(i_series(2, 1.0), rel=1e-10)


@pytest.mark.parametrize("core", CORES)
def test_miller_against_series(core):
    for k in range(20):
        x = 0.5 + 9.5 * k / 19
        vals = miller_bessel_i(20, x, core=core)
        for n in range(21):
            assert _rel(vals[n], i_series(n, x)) <= 1e-10


def test_miller_domain():
    with pytest.raises(DomainError):
        miller_bessel_i(3, 0.0)
    with pytest.raises(DomainError):
        miller_bessel_i(41, 1.0)


# --------------------------------------------------------------------------
# Rys coefficients
# --------------------------------------------------------------------------

def test_rys_examples():
    F = [1.0 / (2 * m + 1) for m in range(6)]
    alpha, beta = rys_coeffs(F)
    assert alpha[0] == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert beta[0] == pytest.approx(4.0 / 45.0, rel=1e-14)
    alpha, beta = rys_coeffs([1.0] * 5)
    assert alpha == [1.0] * 4 and beta == [0.0] * 3


def test_rys_errors():
    with pytest.raises(DivisionByZero):
        rys_coeffs([1.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        rys_coeffs([1.0, 2.0])


@pytest.mark.parametrize("T", [0.1, 1.0, 5.0])
def test_rys_beta_positive(T):
    _, beta = rys_coeffs(boys_eval(12, T))
    assert all(b > 0.0 for b in beta)


# --------------------------------------------------------------------------
# Jacobi matrices and the eigensolver
# --------------------------------------------------------------------------

def test_jacobi_examples():
    leg = legendre_matrix(2)
    assert leg.diag == (0.0, 0.0)
    assert leg.offdiag[0] == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-15)
    cheb = jacobi_matrix(lambda n: 1.0 if n == 1 else 2.0, lambda n: 0.0, lambda n: 1.0, 2)
    assert cheb.offdiag[0] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
    assert all(v == 0.0 for v in legendre_matrix(7).diag)


def test_jacobi_errors():
    with pytest.raises(NegativeUnderRoot):
        jacobi_matrix(lambda n: 1.0, lambda n: 0.0, lambda n: -1.0, 3)
    with pytest.raises(DivisionByZero):
        jacobi_matrix(lambda n: 0.0, lambda n: 0.0, lambda n: 1.0, 2)
    with pytest.raises(DomainError):
        TridiagSym((1.0, 2.0), (1.0, 1.0))
    with pytest.raises(DomainError):
        TridiagSym((math.nan,), ())


@pytest.mark.parametrize("core", CORES)
def test_eigen_examples(core):
    vals, first = tridiag_eigen(TridiagSym((2.5,), ()), core=core)
    assert vals == [2.5] and first == [1.0]
    vals, first = tridiag_eigen(TridiagSym((0.0, 0.0), (0.75,)), core=core)
    assert vals == pytest.approx([-0.75, 0.75], abs=1e-15)
    assert [v * v for v in first] == pytest.approx([0.5, 0.5], abs=1e-15)
    vals, _ = tridiag_eigen(legendre_matrix(3), core=core)
    assert vals == pytest.approx([-0.7745966692, 0.0, 0.7745966692], abs=1e-10)


def test_eigen_no_convergence(monkeypatch):
    def never(diag, offdiag, max_iter):
        return list(diag), [1.0] + [0.0] * (len(diag) - 1), False

    class Stub:
        tridiag_ql = staticmethod(never)

    with pytest.raises(NoConvergence):
        tridiag_eigen(legendre_matrix(4), core=Stub)


def _count_below(m: TridiagSym, x: float) -> int:
    """Sturm count of eigenvalues below x."""
    count, q = 0, 1.0
    for i in range(m.size):
        q = m.diag[i] - x - (m.offdiag[i - 1] ** 2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = -1e-300
        count += q < 0.0
    return count


@pytest.mark.parametrize("core", CORES)
@given(
    st.lists(st.floats(-5.0, 5.0), min_size=2, max_size=12).flatmap(
        lambda d: st.tuples(st.just(d), st.lists(st.floats(0.0, 3.0), min_size=len(d) - 1, max_size=len(d) - 1))
    )
)
def test_eigen_residual(core, data):
    diag, off = data
    m = TridiagSym(tuple(diag), tuple(off))
    vals, first = tridiag_eigen(m, core=core)
    scale = max(1.0, m.norm())
    assert vals == sorted(vals)
    delta = 1e-10 * scale
    for k, lam in enumerate(vals):
        assert _count_below(m, lam - delta) <= k
        assert _count_below(m, lam + delta) >= k + 1
    # spectral moments: sum_k z_k^2 lam_k^j = (T^j)_{00}
    v = [1.0] + [0.0] * (m.size - 1)
    for j in range(4):
        moment = math.fsum(z * z * lam**j for z, lam in zip(first, vals))
        assert abs(moment - v[0]) <= 1e-10 * scale**j
        v = m.matvec(v)


@given(st.lists(st.floats(-5.0, 5.0), min_size=2, max_size=12), st.data())
def test_cores_agree(diag, data):
    if _compiled is None:
        pytest.skip("compiled core not built")
    off = data.draw(st.lists(st.floats(0.0, 3.0), min_size=len(diag) - 1, max_size=len(diag) - 1))
    m = TridiagSym(tuple(diag), tuple(off))
    a = tridiag_eigen(m, core=_core_py)
    b = tridiag_eigen(m, core=_compiled)
    assert a[0] == pytest.approx(b[0], abs=1e-12 * max(1.0, m.norm()))
    T = data.draw(st.floats(0.0, 80.0))
    assert boys_eval(20, T, core=_core_py) == boys_eval(20, T, core=_compiled)
    c = data.draw(st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=20))
    assert clenshaw_sum(c, 0.3, core=_core_py) == clenshaw_sum(c, 0.3, core=_compiled)
    x = data.draw(st.floats(0.1, 30.0))
    assert miller_bessel_i(20, x, core=_core_py) == pytest.approx(miller_bessel_i(20, x, core=_compiled), rel=1e-14)


# --------------------------------------------------------------------------
# Golub-Welsch
# --------------------------------------------------------------------------

@pytest.mark.parametrize("core", CORES)
def test_golub_welsch_examples(core):
    r1 = golub_welsch(legendre_matrix(1), 2.0, core=core)
    assert r1.nodes == (0.0,) and r1.weights == (2.0,)
    r2 = golub_welsch(legendre_matrix(2), 2.0, core=core)
    assert r2.nodes == pytest.approx([-0.5773502692, 0.5773502692], abs=1e-10)
    assert r2.weights == pytest.approx([1.0, 1.0], abs=1e-10)
    r3 = golub_welsch(legendre_matrix(3), 2.0, core=core)
    assert r3.weights == pytest.approx([5 / 9, 8 / 9, 5 / 9], abs=1e-10)
    assert r3.nodes == pytest.approx([-math.sqrt(0.6), 0.0, math.sqrt(0.6)], abs=1e-10)


@pytest.mark.parametrize("n", range(1, 7))
def test_quadrature_exactness(n):
    rule = golub_welsch(legendre_matrix(n), 2.0)
    assert math.fsum(rule.weights) == pytest.approx(2.0, abs=1e-10)
    assert all(w > 0.0 for w in rule.weights)
    for k in range(2 * n):
        assert abs(rule.integrate(lambda x: x**k) - legendre_moment(k)) <= 1e-10


@pytest.mark.parametrize("n", range(1, 6))
def test_node_interlacing(n):
    a = golub_welsch(legendre_matrix(n), 2.0).nodes
    b = golub_welsch(legendre_matrix(n + 1), 2.0).nodes
    for k in range(n):
        assert b[k] < a[k] < b[k + 1]


def test_other_families_integrate_exactly():
    # Hermite weight exp(-x^2): int x^2 = sqrt(pi)/2
    herm = jacobi_matrix(lambda k: 2.0, lambda k: 0.0, lambda k: 2.0 * (k - 1), 5)
    rule = golub_welsch(herm, math.sqrt(math.pi))
    assert rule.integrate(lambda x: x * x) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)
    # Laguerre weight exp(-x): int x^3 = 6
    lag = jacobi_matrix(lambda k: -1.0 / k, lambda k: (2 * k - 1) / k, lambda k: (k - 1) / k, 4)
    rule = golub_welsch(lag, 1.0)
    assert rule.integrate(lambda x: x**3) == pytest.approx(6.0, rel=1e-12)


def test_quadrule_csv():
    rule = golub_welsch(legendre_matrix(2), 2.0)
    lines = rule.to_csv().splitlines()
    assert len(lines) == 2
    x, w = (float(v) for v in lines[1].split(","))
    assert (x, w) == (rule.nodes[1], rule.weights[1])
    with pytest.raises(DomainError):
        QuadRule((0.0,), (1.0, 2.0), 2.0)
    with pytest.raises(DomainError):
        golub_welsch(legendre_matrix(2), 0.0)


def test_rys_alpha_in_unit_interval():
    # alpha_k = F_{k+1}/F_k is a ratio of moments of t^2 on [0, 1]
    alpha, _ = rys_coeffs(boys_eval(12, 1.0))
    assert all(0.0 < a < 1.0 for a in alpha)

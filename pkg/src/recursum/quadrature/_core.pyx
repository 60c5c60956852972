# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same contracts as ``_core_py``."""

from libc.math cimport exp, expm1, sqrt, sinh, fabs, hypot, pow, M_PI
from libc.stdlib cimport malloc, free

BOYS_SEAM = 30.0
SERIES_TERMS = 200
cdef double _RESCALE = 1e250

IMPLEMENTATION = "cython"


cdef double _series_top(int m, double T) noexcept nogil:
    cdef double term = 1.0 / (2 * m + 1)
    cdef double total = term
    cdef int k
    for k in range(1, 200):
        term *= 2.0 * T / (2 * m + 2 * k + 1)
        total += term
        if term < 1e-16 * total:
            break
    return exp(-T) * total


cdef double _asymptotic(int m, double T) noexcept nogil:
    cdef double dfact = 1.0
    cdef int q
    for q in range(1, 2 * m, 2):
        dfact *= q
    return dfact / pow(2.0, m + 1) * sqrt(M_PI / pow(T, 2 * m + 1))


def boys_series_top(int m, double T):
    return _series_top(m, T)


def boys_asymptotic(int m, double T):
    return _asymptotic(m, T)


def boys_eval(int m_max, double T):
    cdef double *F = <double *> malloc((m_max + 1) * sizeof(double))
    if F == NULL:
        raise MemoryError()
    cdef double e = exp(-T)
    cdef double inv_2T
    cdef int m, m_up
    try:
        if T < 30.0:
            F[m_max] = _series_top(m_max, T)
            for m in range(m_max - 1, -1, -1):
                F[m] = (2.0 * T * F[m + 1] + e) / (2 * m + 1)
        else:
            m_up = <int> (T - 0.5)
            if m_up > m_max:
                m_up = m_max
            F[0] = _asymptotic(0, T)
            inv_2T = 0.5 / T
            for m in range(1, m_up + 1):
                F[m] = ((2 * m - 1) * F[m - 1] - e) * inv_2T
            if m_up < m_max:
                F[m_max] = _series_top(m_max, T)
                for m in range(m_max - 1, m_up, -1):
                    F[m] = (2.0 * T * F[m + 1] + e) / (2 * m + 1)
        return [F[m] for m in range(m_max + 1)]
    finally:
        free(F)


def clenshaw_sum(c, double x):
    cdef Py_ssize_t n = len(c)
    cdef double *cc = <double *> malloc(n * sizeof(double))
    if cc == NULL:
        raise MemoryError()
    cdef Py_ssize_t k
    cdef double b1 = 0.0, b2 = 0.0, t
    try:
        for k in range(n):
            cc[k] = c[k]
        for k in range(n - 1, 0, -1):
            t = 2.0 * x * b1 - b2 + cc[k]
            b2 = b1
            b1 = t
        return 0.5 * cc[0] + x * b1 - b2
    finally:
        free(cc)


def miller_bessel_i(int n_max, double x, int pad, bint scaled=False):
    cdef int top = n_max + pad
    cdef double inv_x = 1.0 / x
    cdef double *f = <double *> malloc((top + 2) * sizeof(double))
    if f == NULL:
        raise MemoryError()
    cdef int n, q
    cdef double scale
    try:
        for n in range(top + 2):
            f[n] = 0.0
        f[top] = 1.0
        for n in range(top, 0, -1):
            f[n - 1] = f[n + 1] + (2 * n + 1) * inv_x * f[n]
            if fabs(f[n - 1]) > _RESCALE:
                for q in range(n - 1, top + 1):
                    f[q] /= _RESCALE
        if scaled:
            scale = (-expm1(-2.0 * x) / (2.0 * x)) / f[0]
        else:
            scale = (sinh(x) / x) / f[0]
        return [f[n] * scale for n in range(n_max + 1)]
    finally:
        free(f)


def tridiag_ql(diag, offdiag, int max_iter):
    cdef int n = len(diag)
    cdef double *d = <double *> malloc(n * sizeof(double))
    cdef double *e = <double *> malloc(n * sizeof(double))
    cdef double *z = <double *> malloc(n * sizeof(double))
    if d == NULL or e == NULL or z == NULL:
        free(d); free(e); free(z)
        raise MemoryError()
    cdef int i, l, m, iters = 0
    cdef bint converged = True, underflow
    cdef double dd, g, r, s, c, p, f, b
    try:
        for i in range(n):
            d[i] = diag[i]
            e[i] = offdiag[i] if i < n - 1 else 0.0
            z[i] = 0.0
        z[0] = 1.0
        for l in range(n):
            while True:
                m = l
                while m < n - 1:
                    dd = fabs(d[m]) + fabs(d[m + 1])
                    if fabs(e[m]) <= 1e-300 or fabs(e[m]) + dd == dd:
                        break
                    m += 1
                if m == l:
                    break
                iters += 1
                if iters > max_iter:
                    converged = False
                    break
                g = (d[l + 1] - d[l]) / (2.0 * e[l])
                r = hypot(g, 1.0)
                g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
                s = 1.0
                c = 1.0
                p = 0.0
                i = m - 1
                underflow = False
                while i >= l:
                    f = s * e[i]
                    b = c * e[i]
                    r = hypot(f, g)
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
            if not converged:
                break
        return [d[i] for i in range(n)], [z[i] for i in range(n)], converged
    finally:
        free(d); free(e); free(z)

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Must stay call-compatible with ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

cnp.import_array()


# Complex products are spelled out in real arithmetic (C99 complex
# multiplication goes through __muldc3), and the loop over points is the
# innermost one so consecutive Horner steps do not wait on each other.

def horner(const double complex[:] coeffs, double center, const double complex[:] z):
    cdef Py_ssize_t n = coeffs.shape[0], m = z.shape[0], i, j
    cdef double[::1] wr = np.empty(m), wi = np.empty(m)
    cdef double[::1] ar = np.zeros(m), ai = np.zeros(m)
    cdef double cr, ci, t
    with nogil:
        for i in range(m):
            wr[i] = z[i].real - center
            wi[i] = z[i].imag
        for j in range(n - 1, -1, -1):
            cr = coeffs[j].real
            ci = coeffs[j].imag
            for i in range(m):
                t = ar[i] * wr[i] - ai[i] * wi[i] + cr
                ai[i] = ar[i] * wi[i] + ai[i] * wr[i] + ci
                ar[i] = t
    return np.asarray(ar) + 1j * np.asarray(ai)


def qp_eval(const double complex[:, :] table, double center,
            const double[:] theta, const double complex[:] z):
    """Sum_k e^{2 pi i k theta} sum_j table[k+K, j] (z - center)^j."""
    cdef Py_ssize_t nk = table.shape[0], nd = table.shape[1], m = z.shape[0]
    cdef Py_ssize_t K = (nk - 1) // 2, i, j, k
    cdef double[::1] wr = np.empty(m), wi = np.empty(m)
    cdef double[::1] mr = np.empty(m), mi = np.empty(m)
    cdef double[::1] pr = np.empty(m), pim = np.empty(m), sr = np.empty(m), si = np.empty(m)
    cdef double[::1] accr = np.zeros(m), acci = np.zeros(m)
    cdef double cr, ci, t
    with nogil:
        for i in range(m):
            wr[i] = z[i].real - center
            wi[i] = z[i].imag
            sr[i] = cos(2 * M_PI * theta[i])
            si[i] = sin(2 * M_PI * theta[i])
            # start at e^{-2 pi i K theta}
            pr[i] = cos(2 * M_PI * K * theta[i])
            pim[i] = -sin(2 * M_PI * K * theta[i])
        for k in range(nk):
            for i in range(m):
                mr[i] = 0.0
                mi[i] = 0.0
            for j in range(nd - 1, -1, -1):
                cr = table[k, j].real
                ci = table[k, j].imag
                for i in range(m):
                    t = mr[i] * wr[i] - mi[i] * wi[i] + cr
                    mi[i] = mr[i] * wi[i] + mi[i] * wr[i] + ci
                    mr[i] = t
            for i in range(m):
                accr[i] = accr[i] + mr[i] * pr[i] - mi[i] * pim[i]
                acci[i] = acci[i] + mr[i] * pim[i] + mi[i] * pr[i]
                t = pr[i] * sr[i] - pim[i] * si[i]
                pim[i] = pr[i] * si[i] + pim[i] * sr[i]
                pr[i] = t
    return np.asarray(accr) + 1j * np.asarray(acci)


def flm_orbit(double alpha, double eps, double omega, const double[:] theta,
              const double[:] x, long steps, bint additive):
    cdef Py_ssize_t m = x.shape[0], i
    cdef long s
    xo = np.empty(m, dtype=np.float64)
    do = np.empty(m, dtype=np.float64)
    cdef double[:] xv = xo, dv = do
    cdef double xx, dd, th, force
    with nogil:
        for i in range(m):
            xx = x[i]
            dd = 1.0
            th = theta[i]
            for s in range(steps):
                force = cos(2 * M_PI * th)
                if additive:
                    dd = dd * alpha * (1.0 - 2.0 * xx)
                    xx = alpha * xx * (1.0 - xx) + eps * force
                else:
                    dd = dd * alpha * (1.0 + eps * force) * (1.0 - 2.0 * xx)
                    xx = alpha * xx * (1.0 - xx) * (1.0 + eps * force)
                th = th + omega
            xv[i] = xx
            dv[i] = dd
    return xo, do

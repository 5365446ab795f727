# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation of Gaussian term sums.

Each term is ``coef * r**a * coth(r)**b * csch(r)**c * t**(-d)``; the sum is
evaluated for every entry of ``r``.  Same contract as the numpy fallback in
``_kernels``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cosh, sinh

cnp.import_array()


cdef inline double _ipow(double x, long long k) nogil:
    cdef double out = 1.0
    while k > 0:
        if k & 1:
            out *= x
        x *= x
        k >>= 1
    return out


def eval_terms(const double[::1] coef, const long long[::1] a, const long long[::1] b,
               const long long[::1] c, const long long[::1] d,
               const double[::1] r, double t):
    cdef Py_ssize_t nterms = coef.shape[0]
    cdef Py_ssize_t npts = r.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(npts, dtype=np.float64)
    cdef double[::1] outv = out
    cdef Py_ssize_t i, j
    cdef double x, sh, coth, csch, tinv, acc
    tinv = 1.0 / t
    with nogil:
        for i in range(npts):
            x = r[i]
            sh = sinh(x)
            csch = 1.0 / sh
            coth = cosh(x) * csch
            acc = 0.0
            for j in range(nterms):
                acc += (coef[j] * _ipow(x, a[j]) * _ipow(coth, b[j])
                        * _ipow(csch, c[j]) * _ipow(tinv, d[j]))
            outv[i] = acc
    return out

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: OU intensity scan and exponential-sum root solve."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, cos, sin, fabs

cnp.import_array()


def ou_intensity(cnp.ndarray[cnp.float64_t, ndim=1] noise_re,
                 cnp.ndarray[cnp.float64_t, ndim=1] noise_im,
                 double rho, double sig, double a_re0, double a_im0):
    cdef Py_ssize_t n = noise_re.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double re = a_re0, im = a_im0
    cdef Py_ssize_t i
    for i in range(n):
        re = rho * re + sig * noise_re[i]
        im = rho * im + sig * noise_im[i]
        out[i] = re * re + im * im
    return out, re, im


cdef inline double _msum(double complex[::1] w, double complex[::1] mu,
                         Py_ssize_t k, double t) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    cdef double er, a, b
    for i in range(k):
        er = exp(mu[i].real * t)
        a = mu[i].imag * t
        acc += er * (w[i].real * cos(a) - w[i].imag * sin(a))
    return acc


cdef inline double _dmsum(double complex[::1] w, double complex[::1] mu,
                          Py_ssize_t k, double t) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    cdef double er, a, wr, wi
    for i in range(k):
        er = exp(mu[i].real * t)
        a = mu[i].imag * t
        wr = w[i].real * mu[i].real - w[i].imag * mu[i].imag
        wi = w[i].real * mu[i].imag + w[i].imag * mu[i].real
        acc += er * (wr * cos(a) - wi * sin(a))
    return acc


def expsum_solve(w, mu, double u, double tol=1e-13):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] wa = np.ascontiguousarray(w, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ma = np.ascontiguousarray(mu, dtype=np.complex128)
    cdef double complex[::1] wv = wa
    cdef double complex[::1] mv = ma
    cdef Py_ssize_t k = wa.shape[0]
    cdef double rmax = -1e300
    cdef Py_ssize_t i
    for i in range(k):
        if mv[i].real > rmax:
            rmax = mv[i].real
    cdef double hi = 1.0 if rmax >= 0.0 else -1.0 / rmax
    while _msum(wv, mv, k, hi) > u:
        hi *= 2.0
        if hi > 1e300:
            return hi
    cdef double lo = 0.0, t = 0.5 * hi, f, d, tn
    cdef int it
    for it in range(200):
        f = _msum(wv, mv, k, t) - u
        if f > 0.0:
            lo = t
        else:
            hi = t
        d = _dmsum(wv, mv, k, t)
        if d < 0.0:
            tn = t - f / d
        else:
            tn = lo
        if not (lo < tn < hi):
            tn = 0.5 * (lo + hi)
        if fabs(tn - t) <= tol * (tn if tn > 1.0 else 1.0):
            return tn
        t = tn
    return t

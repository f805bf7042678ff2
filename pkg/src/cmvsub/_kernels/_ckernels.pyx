# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the sequential 2x2 recurrences.

Loop bodies mirror cmvsub._kernels.pykernels operation for operation so the
two backends agree bit for bit while values stay finite; the parity test in
tests/test_kernels.py holds both to that.  Divisions by rho (and by the rescale factor) are
multiplications by a precomputed reciprocal and 1/z is expanded
componentwise, matching the pure kernels: C and CPython round
complex-by-real division differently, reciprocal multiplies they round
alike.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()


def szego_track(cnp.complex128_t[::1] alpha, double complex z,
                double complex a0, double complex b0):
    cdef Py_ssize_t n = alpha.shape[0]
    a_arr = np.empty(n + 1, dtype=np.complex128)
    b_arr = np.empty(n + 1, dtype=np.complex128)
    cdef cnp.complex128_t[::1] a = a_arr
    cdef cnp.complex128_t[::1] b = b_arr
    cdef double complex av = a0
    cdef double complex bv = b0
    cdef double complex al, an, bn
    cdef double rho, invr
    cdef Py_ssize_t j
    a[0] = a0
    b[0] = b0
    for j in range(n):
        al = alpha[j]
        rho = sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
        invr = 1.0 / rho
        an = (z * av - al.conjugate() * bv) * invr
        bn = (-al * z * av + bv) * invr
        a[j + 1] = an
        b[j + 1] = bn
        av = an
        bv = bn
    return a_arr, b_arr


def gz_track_up(cnp.complex128_t[::1] alpha, double complex z,
                double complex u0, double complex v0, int start_parity):
    cdef Py_ssize_t n = alpha.shape[0]
    u_arr = np.empty(n + 1, dtype=np.complex128)
    v_arr = np.empty(n + 1, dtype=np.complex128)
    cdef cnp.complex128_t[::1] u = u_arr
    cdef cnp.complex128_t[::1] v = v_arr
    cdef double complex uv = u0
    cdef double complex vv = v0
    cdef double zd = z.real * z.real + z.imag * z.imag
    cdef double complex zinv = (z.real / zd) + 1j * (-z.imag / zd)
    cdef double complex al, un, vn
    cdef double rho, invr
    cdef int par = start_parity & 1
    cdef Py_ssize_t j
    u[0] = u0
    v[0] = v0
    for j in range(n):
        al = alpha[j]
        rho = sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
        invr = 1.0 / rho
        if par == 0:
            un = (-al * uv + zinv * vv) * invr
            vn = (z * uv - al.conjugate() * vv) * invr
        else:
            un = (-al.conjugate() * uv + vv) * invr
            vn = (uv - al * vv) * invr
        u[j + 1] = un
        v[j + 1] = vn
        uv = un
        vv = vn
        par ^= 1
    return u_arr, v_arr


def gz_track_down(cnp.complex128_t[::1] alpha, double complex z,
                  double complex u0, double complex v0, int start_parity):
    cdef Py_ssize_t n = alpha.shape[0]
    u_arr = np.empty(n + 1, dtype=np.complex128)
    v_arr = np.empty(n + 1, dtype=np.complex128)
    cdef cnp.complex128_t[::1] u = u_arr
    cdef cnp.complex128_t[::1] v = v_arr
    cdef double complex uv = u0
    cdef double complex vv = v0
    cdef double zd = z.real * z.real + z.imag * z.imag
    cdef double complex zinv = (z.real / zd) + 1j * (-z.imag / zd)
    cdef double complex al, un, vn
    cdef double rho, invr
    cdef int par = start_parity & 1
    cdef Py_ssize_t j
    u[0] = u0
    v[0] = v0
    for j in range(n):
        al = alpha[j]
        rho = sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
        invr = 1.0 / rho
        if par == 0:
            un = (al.conjugate() * uv + zinv * vv) * invr
            vn = (z * uv + al * vv) * invr
        else:
            un = (al * uv + vv) * invr
            vn = (uv + al.conjugate() * vv) * invr
        u[j + 1] = un
        v[j + 1] = vn
        uv = un
        vv = vn
        par ^= 1
    return u_arr, v_arr


def lognorm_scan(cnp.complex128_t[::1] alpha, double complex z):
    cdef Py_ssize_t n = alpha.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double complex m00 = 1.0
    cdef double complex m01 = 0.0
    cdef double complex m10 = 0.0
    cdef double complex m11 = 1.0
    cdef double complex s00, s01, s10, s11, n00, n01, n10, n11, det
    cdef double logscale = 0.0
    cdef double rho, invr, invb, big, f2, disc, smax2
    cdef double a00, a01, a10, a11, adet
    cdef double complex al
    cdef Py_ssize_t j
    for j in range(n):
        al = alpha[j]
        rho = sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
        invr = 1.0 / rho
        s00 = z * invr
        s01 = -al.conjugate() * invr
        s10 = -al * z * invr
        s11 = invr
        n00 = s00 * m00 + s01 * m10
        n01 = s00 * m01 + s01 * m11
        n10 = s10 * m00 + s11 * m10
        n11 = s10 * m01 + s11 * m11
        m00 = n00
        m01 = n01
        m10 = n10
        m11 = n11
        big = max(abs(m00), abs(m01), abs(m10), abs(m11))
        if big > 1e75:  # keeps f2*f2 below double overflow
            invb = 1.0 / big
            m00 = m00 * invb
            m01 = m01 * invb
            m10 = m10 * invb
            m11 = m11 * invb
            logscale += log(big)
        a00 = abs(m00)
        a01 = abs(m01)
        a10 = abs(m10)
        a11 = abs(m11)
        f2 = a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11
        det = m00 * m11 - m01 * m10
        adet = abs(det)
        disc = f2 * f2 - 4.0 * adet * adet
        if disc < 0.0:
            disc = 0.0
        smax2 = 0.5 * (f2 + sqrt(disc))
        out[j] = logscale + 0.5 * log(smax2)
    return out_arr

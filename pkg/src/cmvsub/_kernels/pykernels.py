"""Pure-Python reference kernels for the sequential 2x2 recurrences.

These are the fallback when the compiled extension is unavailable; the
compiled versions in _ckernels.pyx implement the same loops with the same
operation order, so results are bit-identical between backends while they
stay finite (past the first overflow, C and numpy repair inf/nan
products differently).  Divisions
by rho (and by the rescale factor) are written as multiplication by a
precomputed reciprocal, and 1/z is expanded componentwise: C and CPython
round complex-by-real division differently, reciprocal multiplies they
round alike.
"""

import math

import numpy as np


def szego_track(alpha, z, a0, b0):
    """Run (a, b) <- S(alpha_n, z)(a, b) over the given coefficients.

    S(alpha, z) = (1/rho) [[z, -conj(alpha)], [-alpha z, 1]].
    Returns two complex arrays of length len(alpha) + 1 including the seed.
    """
    n = len(alpha)
    a = np.empty(n + 1, dtype=np.complex128)
    b = np.empty(n + 1, dtype=np.complex128)
    a[0] = a0
    b[0] = b0
    av = a0
    bv = b0
    for j in range(n):
        al = alpha[j]
        rho = math.sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
        invr = 1.0 / rho
        an = (z * av - al.conjugate() * bv) * invr
        bn = (-al * z * av + bv) * invr
        a[j + 1] = an
        b[j + 1] = bn
        av = an
        bv = bn
    return a, b


def gz_track_up(alpha, z, u0, v0, start_parity):
    """Run (u, v) <- T(n, z)(u, v) upward, alternating P (even n) and Q (odd n).

    alpha[j] is the coefficient at n = n0 + j and start_parity = n0 mod 2.
    P(alpha, z) = (1/rho) [[-alpha, 1/z], [z, -conj(alpha)]]
    Q(alpha, z) = (1/rho) [[-conj(alpha), 1], [1, -alpha]]
    """
    n = len(alpha)
    u = np.empty(n + 1, dtype=np.complex128)
    v = np.empty(n + 1, dtype=np.complex128)
    u[0] = u0
    v[0] = v0
    uv = u0
    vv = v0
    zd = z.real * z.real + z.imag * z.imag
    zinv = complex(z.real / zd, -z.imag / zd)
    par = start_parity & 1
    for j in range(n):
        al = alpha[j]
        rho = math.sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
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
    return u, v


def gz_track_down(alpha, z, u0, v0, start_parity):
    """Run (u, v) <- T(n, z)^{-1}(u, v) downward from n0.

    alpha[j] is the coefficient at n = n0 - 1 - j (the step from n0 - j to
    n0 - 1 - j applies T(n0 - 1 - j)^{-1}); start_parity = (n0 - 1) mod 2.
    P^{-1} = (1/rho) [[conj(alpha), 1/z], [z, alpha]]
    Q^{-1} = (1/rho) [[alpha, 1], [1, conj(alpha)]]
    """
    n = len(alpha)
    u = np.empty(n + 1, dtype=np.complex128)
    v = np.empty(n + 1, dtype=np.complex128)
    u[0] = u0
    v[0] = v0
    uv = u0
    vv = v0
    zd = z.real * z.real + z.imag * z.imag
    zinv = complex(z.real / zd, -z.imag / zd)
    par = start_parity & 1
    for j in range(n):
        al = alpha[j]
        rho = math.sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
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
    return u, v


def lognorm_scan(alpha, z):
    """Natural-log 2-norms of the left products S(alpha_n, z) ... S(alpha_0, z).

    Entry j is log ||A(j)|| with A(j) the product over coefficients 0..j.
    The running product is rescaled whenever its largest entry passes 1e75,
    so norms up to e^{~1e4} are representable without overflow.
    """
    n = len(alpha)
    out = np.empty(n, dtype=np.float64)
    m00 = 1.0 + 0.0j
    m01 = 0.0 + 0.0j
    m10 = 0.0 + 0.0j
    m11 = 1.0 + 0.0j
    logscale = 0.0
    for j in range(n):
        al = alpha[j]
        rho = math.sqrt(1.0 - (al.real * al.real + al.imag * al.imag))
        invr = 1.0 / rho
        # M <- S(alpha_j, z) M
        s00 = z * invr
        s01 = -al.conjugate() * invr
        s10 = -al * z * invr
        s11 = invr
        n00 = s00 * m00 + s01 * m10
        n01 = s00 * m01 + s01 * m11
        n10 = s10 * m00 + s11 * m10
        n11 = s10 * m01 + s11 * m11
        m00, m01, m10, m11 = n00, n01, n10, n11
        big = max(abs(m00), abs(m01), abs(m10), abs(m11))
        if big > 1e75:  # keeps f2*f2 below double overflow
            invb = 1.0 / big
            m00 *= invb
            m01 *= invb
            m10 *= invb
            m11 *= invb
            logscale += math.log(big)
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
        smax2 = 0.5 * (f2 + math.sqrt(disc))
        out[j] = logscale + 0.5 * math.log(smax2)
    return out

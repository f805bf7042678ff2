import math

import numpy as np
import pytest

from cmvsub import _kernels

needs_compiled = pytest.mark.skipif(
    not _kernels.COMPILED, reason="compiled extension not built")


def _random_alphas(rng, n, radius):
    r = radius * np.sqrt(rng.uniform(size=n))
    ph = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return (r * np.exp(1j * ph)).astype(np.complex128)


def _cases(rng, count):
    # radii and lengths chosen so every track stays far from overflow:
    # worst-case growth per step is log((1+r)/rho) < 0.7, length <= 400
    for _ in range(count):
        n = int(rng.integers(5, 400))
        radius = float(rng.uniform(0.1, 0.6))
        al = _random_alphas(rng, n, radius)
        z = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
                    * rng.uniform(0.7, 1.0))
        yield al, z


@needs_compiled
def test_szego_track_bit_parity(rng):
    for al, z in _cases(rng, 40):
        a1, b1 = _kernels.szego_track(al, z, 1.0 + 0j, 1.0 + 0j)
        a2, b2 = _kernels.pure.szego_track(al, z, 1.0 + 0j, 1.0 + 0j)
        assert np.all(np.isfinite(a1)) and np.all(np.isfinite(b1))
        assert np.array_equal(a1, a2)
        assert np.array_equal(b1, b2)


@needs_compiled
def test_gz_track_up_bit_parity(rng):
    for al, z in _cases(rng, 40):
        for par in (0, 1):
            u1, v1 = _kernels.gz_track_up(al, z, 1.0 + 0j, -1.0 + 0j, par)
            u2, v2 = _kernels.pure.gz_track_up(al, z, 1.0 + 0j, -1.0 + 0j, par)
            assert np.all(np.isfinite(u1))
            assert np.array_equal(u1, u2)
            assert np.array_equal(v1, v2)


@needs_compiled
def test_gz_track_down_bit_parity(rng):
    for al, z in _cases(rng, 40):
        for par in (0, 1):
            u1, v1 = _kernels.gz_track_down(al, z, 0.5 + 0.5j, 1.0 + 0j, par)
            u2, v2 = _kernels.pure.gz_track_down(al, z, 0.5 + 0.5j, 1.0 + 0j, par)
            assert np.all(np.isfinite(u1))
            assert np.array_equal(u1, u2)
            assert np.array_equal(v1, v2)


@needs_compiled
def test_lognorm_scan_bit_parity(rng):
    for al, z in _cases(rng, 40):
        l1 = _kernels.lognorm_scan(al, z)
        l2 = _kernels.pure.lognorm_scan(al, z)
        assert np.all(np.isfinite(l1))
        assert np.array_equal(l1, l2)


def test_pure_szego_free_case():
    # alpha = 0: the step is diag(z, 1), so b never moves and a is the
    # plain running product of z with itself
    z = complex(np.exp(0.81j)) * 0.93
    al = np.zeros(64, dtype=np.complex128)
    a, b = _kernels.pure.szego_track(al, z, 1.0 + 0j, 1.0 + 0j)
    assert np.all(b == 1.0 + 0j)
    acc = 1.0 + 0j
    for j in range(64):
        assert a[j] == acc
        acc = acc * z
    assert a[64] == acc


def test_pure_gz_free_case():
    # alpha = 0 alternates [[0, 1/z], [z, 0]] with the plain swap, giving
    # u = 1/z, z, z^{-2}, z^2, ... when seeded at an even site with (1, 1)
    z = complex(np.exp(0.3j))
    al = np.zeros(9, dtype=np.complex128)
    u, v = _kernels.pure.gz_track_up(al, z, 1.0 + 0j, 1.0 + 0j, 0)
    zinv = complex(z.real / abs(z) ** 2, -z.imag / abs(z) ** 2)
    assert u[0] == 1.0
    assert u[1] == zinv
    assert u[2] == z
    assert abs(u[3] - zinv * zinv) < 1e-15
    assert abs(u[4] - z * z) < 1e-15
    assert v[1] == z
    assert abs(v[2] - zinv) < 1e-15


def test_pure_down_inverts_up(rng):
    # one downward sweep undoes the upward sweep step by step
    al = _random_alphas(rng, 30, 0.5)
    z = complex(np.exp(0.9j))
    u, v = _kernels.pure.gz_track_up(al, z, 1.0 + 0j, 0.3 - 0.2j, 0)
    ud, vd = _kernels.pure.gz_track_down(al[::-1].copy(), z, u[-1], v[-1], (30 - 1) % 2)
    # roundtrip rounding grows with the track's condition, not machine-eps
    assert abs(ud[-1] - 1.0) < 1e-10
    assert abs(vd[-1] - (0.3 - 0.2j)) < 1e-10


def test_lognorm_rescale_continuity():
    # constant hyperbolic growth crosses the 1e75 rescale threshold around
    # step 160; the dense product is still below double overflow there, so
    # the scan can be checked directly across the boundary
    a = 0.8
    z = 1.0 + 0j
    n = 260
    al = np.full(n, a, dtype=np.complex128)
    logs = _kernels.pure.lognorm_scan(al, complex(z))
    rho = math.sqrt(1.0 - a * a)
    step = np.array([[z, -a], [-a * z, 1.0]], dtype=complex) / rho
    acc = np.eye(2, dtype=complex)
    for j in range(n):
        acc = step @ acc
        ref = math.log(np.linalg.norm(acc, 2))
        assert abs(logs[j] - ref) < 1e-9 * max(1.0, ref)
    # the growth rate must be the log of the larger eigenvalue throughout
    rate = math.log((1.0 + a) / rho)
    assert (logs[-1] - logs[-60]) / 59.0 == pytest.approx(rate, rel=1e-6)


@needs_compiled
def test_backend_flag_consistency():
    assert _kernels.szego_track is not _kernels.pure.szego_track

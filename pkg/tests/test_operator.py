import math

import numpy as np
import pytest

from cmvsub import (
    Constant,
    RandomIID,
    build_extended,
    build_half_line_plus,
    dump_matrix,
    lm_factorize,
    spectral_measure,
    theta_block,
)
from conftest import random_source


def test_theta_block_unitary(rng):
    for _ in range(50):
        a = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        blk = theta_block(a)
        assert blk.shape == (2, 2)
        resid = np.max(np.abs(blk @ blk.conj().T - np.eye(2)))
        assert resid < 1e-14


@pytest.mark.parametrize("N", [4, 17, 64, 128])
def test_half_line_truncation_unitary(rng, N):
    src = random_source(rng)
    op = build_half_line_plus(src, N)
    assert op.dim == N + 1
    assert op.unitarity_residual() < 1e-12


@pytest.mark.parametrize("phase", [1.0, -1.0, 1j])
def test_half_line_boundary_phase_unitary(phase):
    src = RandomIID(seed=3, radius=0.5)
    op = build_half_line_plus(src, 33, boundary_phase=phase)
    assert op.unitarity_residual() < 1e-12


def test_extended_truncation_unitary(rng):
    src = random_source(rng)
    op = build_extended(src, -17, 16, phase_left=-1.0, phase_right=1.0)
    assert op.dim == 34
    assert op.unitarity_residual() < 1e-12


def test_five_diagonal_bandwidth():
    op = build_extended(RandomIID(seed=1), -9, 8)
    dense = op.to_dense()
    for i in range(op.dim):
        for j in range(op.dim):
            if abs(i - j) > 2:
                assert dense[i, j] == 0


def test_entry_matches_dense():
    op = build_half_line_plus(RandomIID(seed=8), 20)
    dense = op.to_dense()
    for i in range(op.dim):
        for j in range(max(0, i - 2), min(op.dim, i + 3)):
            assert op.entry(i, j) == dense[i, j]


def test_lm_factorization_reproduces_truncation(rng):
    src = random_source(rng)
    op = build_extended(src, -8, 7, phase_left=-1.0, phase_right=1.0)
    L, M = lm_factorize(src, (-8, 7), phase_left=-1.0, phase_right=1.0)
    resid = np.max(np.abs(L @ M - op.to_dense()))
    assert resid < 1e-13
    # both factors are themselves unitary
    assert np.max(np.abs(L @ L.conj().T - np.eye(op.dim))) < 1e-13
    assert np.max(np.abs(M @ M.conj().T - np.eye(op.dim))) < 1e-13


def test_lm_window_alignment_enforced():
    with pytest.raises(ValueError):
        lm_factorize(Constant(0.2), (-7, 7))
    with pytest.raises(ValueError):
        lm_factorize(Constant(0.2), (-8, 8))


def test_spectral_measure_basics():
    src = RandomIID(seed=7, radius=0.5)
    op = build_extended(src, -33, 32, phase_left=-1.0, phase_right=1.0)
    meas = spectral_measure(op, [0, 1])
    assert np.all(np.diff(meas.eigenangles) >= 0)
    assert np.all(meas.eigenangles >= 0) and np.all(meas.eigenangles < 2 * math.pi)
    assert np.all(meas.weights >= -1e-14)
    # one unit of mass per anchor vector
    assert abs(meas.mass() - 2.0) < 1e-10


def test_spectral_measure_anchor_validation():
    op = build_extended(Constant(0.0), -5, 4)
    with pytest.raises(ValueError):
        spectral_measure(op, [99])


def test_borel_transform_positivity(rng):
    # Caratheodory side of a positive measure: Re > 0 inside the disk
    src = random_source(rng)
    op = build_extended(src, -17, 16, phase_left=-1.0, phase_right=1.0)
    meas = spectral_measure(op, [0, 1])
    for _ in range(25):
        z = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        assert meas.borel(complex(z)).real > 0


def test_free_case_measure_is_flat():
    # alpha = 0: the half-line operator is the free shift-like unitary whose
    # delta_0 measure is Lebesgue; finite truncation spreads it evenly
    op = build_half_line_plus(Constant(0.0), 64, boundary_phase=-1.0)
    meas = spectral_measure(op, [0])
    assert abs(meas.mass() - 1.0) < 1e-10
    assert np.max(meas.weights) < 5.0 / op.dim


def test_dump_matrix(tmp_path):
    op = build_half_line_plus(Constant(0.3), 6)
    path = tmp_path / "op.txt"
    dump_matrix(op, path)
    rows = path.read_text().strip().splitlines()
    dense = op.to_dense()
    assert len(rows) == np.count_nonzero(dense)
    i, j, re, im = rows[0].split()
    assert complex(float(re), float(im)) == dense[int(i), int(j)]

"""Finite unitary truncations of CMV and extended CMV matrices.

Truncations are taken by unimodular decoupling: installing |alpha| = 1 at the
cut indices kills the couplings across the cuts (rho = 0), so the restriction
of the doubly infinite five-diagonal matrix to the window is itself unitary.

Storage is banded-first (scipy solve_banded layout); dense matrices are
materialized only for the eigensolver oracle and for small-window tests.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import scipy.linalg

from .coeffs import CoefficientSource

__all__ = [
    "ThetaBlock",
    "TruncatedOperator",
    "SpectralMeasureSample",
    "DiagnosticError",
    "theta_block",
    "build_half_line_plus",
    "build_extended",
    "lm_factorize",
    "spectral_measure",
    "dump_matrix",
]

_BANDS = (2, 2)  # five-diagonal


class DiagnosticError(RuntimeError):
    """Numerical-backend failure carrying the offending residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def theta_block(alpha: complex) -> np.ndarray:
    """2x2 block [[conj(a), rho], [rho, -a]]; unitary for |a| <= 1."""
    a = complex(alpha)
    rho = math.sqrt(max(0.0, 1.0 - (a.real * a.real + a.imag * a.imag)))
    return np.array([[a.conjugate(), rho], [rho, -a]], dtype=np.complex128)


ThetaBlock = theta_block  # spec-level type is just the block itself


@dataclasses.dataclass(frozen=True)
class TruncatedOperator:
    window: tuple
    flavor: str  # half_line_plus | half_line_minus | extended
    boundary_phases: tuple
    ab: np.ndarray  # (5, dim) banded storage, solve_banded layout

    @property
    def dim(self) -> int:
        return self.window[1] - self.window[0] + 1

    def entry(self, i: int, j: int) -> complex:
        """Matrix entry by window-relative row/col."""
        if abs(i - j) > 2:
            return 0.0
        return complex(self.ab[2 + i - j, j])

    def to_dense(self) -> np.ndarray:
        dim = self.dim
        dense = np.zeros((dim, dim), dtype=np.complex128)
        for d in range(-2, 3):
            vec = self.ab[2 - d, max(d, 0) : max(d, 0) + (dim - abs(d))]
            idx = np.arange(dim - abs(d))
            dense[idx + max(-d, 0), idx + max(d, 0)] = vec
        return dense

    def unitarity_residual(self) -> float:
        dense = self.to_dense()
        return float(np.max(np.abs(dense @ dense.conj().T - np.eye(self.dim))))


@dataclasses.dataclass(frozen=True)
class SpectralMeasureSample:
    eigenangles: np.ndarray  # sorted, in [0, 2*pi)
    weights: np.ndarray
    anchors: tuple

    def mass(self) -> float:
        return float(np.sum(self.weights))

    def borel(self, z: complex) -> complex:
        """Sum of w_k (zeta_k + z)/(zeta_k - z) over the sample."""
        zeta = np.exp(1j * self.eigenangles)
        return complex(np.sum(self.weights * (zeta + z) / (zeta - z)))


def _row_entries(row: int, alpha_of):
    """Global (col -> value) map for one row of the five-diagonal matrix."""
    if row % 2 == 0:
        j2 = row  # = 2j
        a_r = alpha_of(j2)
        a_rm = alpha_of(j2 - 1)
        a_rp = alpha_of(j2 + 1)
        rho_r = _rho(a_r)
        return {
            j2 - 1: a_r.conjugate() * _rho(a_rm),
            j2: -a_r.conjugate() * a_rm,
            j2 + 1: rho_r * a_rp.conjugate(),
            j2 + 2: rho_r * _rho(a_rp),
        }
    j2 = row - 1  # = 2j
    a_e = alpha_of(j2)
    a_rm = alpha_of(j2 - 1)
    a_rp = alpha_of(j2 + 1)
    rho_e = _rho(a_e)
    return {
        j2 - 1: rho_e * _rho(a_rm),
        j2: -rho_e * a_rm,
        j2 + 1: -a_e * a_rp.conjugate(),
        j2 + 2: -a_e * _rho(a_rp),
    }


def _rho(a: complex) -> float:
    return math.sqrt(max(0.0, 1.0 - (a.real * a.real + a.imag * a.imag)))


def _build(source, lo, hi, phase_left, phase_right, flavor):
    pl, pr = complex(phase_left), complex(phase_right)
    for name, p in (("phase_left", pl), ("phase_right", pr)):
        if abs(abs(p) - 1.0) > 1e-12:
            raise ValueError(f"{name} must be unimodular, got |{name}| = {abs(p)}")

    def alpha_of(n: int) -> complex:
        if n == lo - 1:
            return pl
        if n == hi:
            return pr
        if lo <= n < hi:
            return source.alpha_at(n)
        # indices lo-2 and hi+1 only ever appear scaled by a cut rho = 0
        return 0.0

    dim = hi - lo + 1
    ab = np.zeros((5, dim), dtype=np.complex128)
    for row in range(lo, hi + 1):
        i = row - lo
        for col, val in _row_entries(row, alpha_of).items():
            j = col - lo
            if 0 <= j < dim:
                ab[2 + i - j, j] = val
    return TruncatedOperator((lo, hi), flavor, (pl, pr), ab)


def build_half_line_plus(source: CoefficientSource, N: int, boundary_phase=1.0) -> TruncatedOperator:
    """(N+1)-dimensional half-line truncation: alpha_0..alpha_{N-1} from the
    source, alpha_N = boundary_phase, origin cut fixed at alpha_{-1} = -1."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return _build(source, 0, N, -1.0, boundary_phase, "half_line_plus")


def build_extended(source: CoefficientSource, n_min: int, n_max: int,
                   phase_left=1.0, phase_right=1.0) -> TruncatedOperator:
    """Window truncation of the doubly infinite matrix over [n_min, n_max]."""
    if not (n_min < 0 < n_max):
        raise ValueError("window must satisfy n_min < 0 < n_max (rows 0 and 1 inside)")
    return _build(source, n_min, n_max, phase_left, phase_right, "extended")


def lm_factorize(source: CoefficientSource, window, phase_left=1.0, phase_right=1.0):
    """Split the window truncation into the two block-diagonal unitaries.

    L carries the blocks on index pairs (2j, 2j+1) and M those on
    (2j+1, 2j+2); the window must start on an even index and end on an odd
    one so both tilings close. Cut pairs collapse to unimodular scalars
    because rho = 0 there. Returns (L, M) dense; L @ M equals the window
    truncation built with the same phases.
    """
    lo, hi = window
    if lo % 2 != 0 or hi % 2 == 0:
        raise ValueError(f"window [{lo}, {hi}] misaligned: need even start, odd end")
    pl, pr = complex(phase_left), complex(phase_right)

    def alpha_of(n: int) -> complex:
        if n == lo - 1:
            return pl
        if n == hi:
            return pr
        if lo <= n < hi:
            return source.alpha_at(n)
        return 0.0

    dim = hi - lo + 1
    L = np.zeros((dim, dim), dtype=np.complex128)
    M = np.zeros((dim, dim), dtype=np.complex128)
    for even in range(lo, hi + 1, 2):  # L pairs (even, even+1), fully inside
        i = even - lo
        L[i : i + 2, i : i + 2] = theta_block(alpha_of(even))
    # M pair (lo-1, lo) is cut: the surviving scalar at lo is -alpha_{lo-1}
    M[0, 0] = -alpha_of(lo - 1)
    for odd in range(lo + 1, hi - 1, 2):
        i = odd - lo
        M[i : i + 2, i : i + 2] = theta_block(alpha_of(odd))
    # M pair (hi, hi+1) is cut: the surviving scalar at hi is conj(alpha_hi)
    M[dim - 1, dim - 1] = alpha_of(hi).conjugate()
    return L, M


def spectral_measure(op: TruncatedOperator, anchors) -> SpectralMeasureSample:
    """Dense eigendecomposition oracle.

    anchors are lattice indices (window coordinates of the operator);
    weights are w_k = sum_j |<delta_j, v_k>|^2 over the anchor set.
    """
    lo, hi = op.window
    rows = []
    for a in anchors:
        if not (lo <= a <= hi):
            raise ValueError(f"anchor {a} outside window [{lo}, {hi}]")
        rows.append(a - lo)
    dense = op.to_dense()
    T, Zv = scipy.linalg.schur(dense, output="complex")
    lam = np.diag(T).copy()
    residual = float(np.max(np.abs(dense @ Zv - Zv * lam[np.newaxis, :])))
    if residual > 1e-8:
        raise DiagnosticError("eigensolver residual above tolerance", residual)
    # unitary input: eigenvalues sit on the circle up to rounding
    angles = np.mod(np.angle(lam), 2.0 * math.pi)
    weights = np.zeros(len(lam))
    for r in rows:
        weights += np.abs(Zv[r, :]) ** 2
    order = np.argsort(angles)
    return SpectralMeasureSample(angles[order], weights[order], tuple(anchors))


def dump_matrix(op: TruncatedOperator, path) -> None:
    """Write stored entries as 'row col re im' lines (window-relative indices)."""
    dim = op.dim
    with open(path, "w") as fh:
        for i in range(dim):
            for j in range(max(0, i - 2), min(dim, i + 3)):
                v = op.entry(i, j)
                if v != 0.0:
                    fh.write(f"{i} {j} {v.real!r} {v.imag!r}\n")

"""Solution recursions: Szegő polynomial pairs, transfer-matrix cocycles,
and the five-diagonal eigenvalue equation's two-component tracks.

Track propagation runs through the kernel backend (compiled when available);
everything here is pure and the returned tracks are immutable value objects.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import _kernels
from .coeffs import CoefficientSource, reflect

__all__ = [
    "Transfer2x2",
    "SolutionTrack",
    "SingularCoefficientError",
    "szego_matrix",
    "gz_matrix",
    "transfer_product",
    "transfer_log_norms",
    "polynomials",
    "szego_track_values",
    "gz_track",
    "omega_track",
    "dump_track_csv",
]


class SingularCoefficientError(ValueError):
    """Raised when a transfer matrix is requested at |alpha| = 1."""


def _alpha_rho(alpha):
    a = complex(getattr(alpha, "alpha", alpha))
    m2 = a.real * a.real + a.imag * a.imag
    if m2 >= 1.0:
        raise SingularCoefficientError(f"|alpha| = {math.sqrt(m2)} is not < 1")
    return a, math.sqrt(1.0 - m2)


@dataclasses.dataclass(frozen=True)
class Transfer2x2:
    entries: np.ndarray
    kind: str  # S | P | Q | product

    def det(self) -> complex:
        e = self.entries
        return complex(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])

    def norm2(self) -> float:
        """Exact spectral norm of the 2x2 block."""
        e = self.entries
        f2 = float(np.sum(np.abs(e) ** 2))
        d = abs(self.det()) ** 2
        disc = max(f2 * f2 - 4.0 * d, 0.0)
        return math.sqrt(0.5 * (f2 + math.sqrt(disc)))

    def __matmul__(self, other):
        return Transfer2x2(self.entries @ other.entries, "product")


def szego_matrix(alpha, z: complex) -> Transfer2x2:
    """S(alpha, z) = (1/rho) [[z, -conj(alpha)], [-alpha z, 1]]; det = z."""
    a, rho = _alpha_rho(alpha)
    z = complex(z)
    m = np.array([[z, -a.conjugate()], [-a * z, 1.0]], dtype=np.complex128) / rho
    return Transfer2x2(m, "S")


def gz_matrix(alpha, z: complex, parity: str) -> Transfer2x2:
    """One-step matrix of the two-component eigenvalue recursion.

    even: P(alpha, z) = (1/rho) [[-alpha, 1/z], [z, -conj(alpha)]]
    odd:  Q(alpha, z) = (1/rho) [[-conj(alpha), 1], [1, -alpha]]
    Both have determinant -1.
    """
    a, rho = _alpha_rho(alpha)
    z = complex(z)
    if parity == "even":
        m = np.array([[-a, 1.0 / z], [z, -a.conjugate()]], dtype=np.complex128) / rho
        return Transfer2x2(m, "P")
    if parity == "odd":
        m = np.array([[-a.conjugate(), 1.0], [1.0, -a]], dtype=np.complex128) / rho
        return Transfer2x2(m, "Q")
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def _alpha_array(source: CoefficientSource, n_from: int, count: int) -> np.ndarray:
    return np.array([source.alpha_at(n_from + j) for j in range(count)], dtype=np.complex128)


def transfer_product(source: CoefficientSource, n: int, z: complex) -> Transfer2x2:
    """Ordered cocycle product A(n, z).

    n >= 0: S(alpha_n, z) ... S(alpha_0, z).
    n <= -1: the product over the reflected coefficients, A(n, z) = A~(-n, z),
    whose factor list S(-conj(alpha_{n-2})) ... S(-conj(alpha_{-2})) carries the
    most negative original index leftmost.
    """
    z = complex(z)
    if n >= 0:
        alphas = _alpha_array(source, 0, n + 1)
    else:
        refl = reflect(source)
        alphas = _alpha_array(refl, 0, -n + 1)
    acc = np.eye(2, dtype=np.complex128)
    for a in alphas:
        aa, rho = _alpha_rho(a)
        step = np.array([[z, -aa.conjugate()], [-aa * z, 1.0]], dtype=np.complex128) / rho
        acc = step @ acc
    return Transfer2x2(acc, "product")


def transfer_log_norms(source: CoefficientSource, n_max: int, z: complex, side: int = +1) -> np.ndarray:
    """log ||A(n, z)|| for n = 0..n_max (side +1) or n = -1..-n_max-1 (side -1).

    Log-scaled accumulation; safe far past the overflow threshold of a plain
    product. Entry j corresponds to |n| = j + (0 if side > 0 else 1).
    """
    if side > 0:
        alphas = _alpha_array(source, 0, n_max + 1)
    else:
        alphas = _alpha_array(reflect(source), 0, n_max + 1)
    return _kernels.lognorm_scan(alphas, complex(z))


@dataclasses.dataclass(frozen=True)
class SolutionTrack:
    """Two-component solution values over a contiguous index range.

    Values are stored in propagation order: entry k sits at lattice index
    n0 + step*k. For the second-kind polynomial flavor the raw propagated
    pair is (psi, -psi*); `second` stores psi* itself.
    """

    flavor: str
    z: complex
    n0: int
    step: int  # +1 upward, -1 downward
    first: np.ndarray
    second: np.ndarray
    omega: float | None = None

    def __len__(self) -> int:
        return len(self.first)

    def indices(self) -> np.ndarray:
        return self.n0 + self.step * np.arange(len(self.first))

    def at(self, n: int):
        k = (n - self.n0) * self.step
        if not (0 <= k < len(self.first)):
            raise IndexError(f"index {n} outside track range")
        return complex(self.first[k]), complex(self.second[k])


def polynomials(source: CoefficientSource, z: complex, N: int, kind: str = "first") -> SolutionTrack:
    """Szegő polynomial pair up to degree N.

    first: (phi_n, phi*_n) from (1, 1).
    second: (psi_n, psi*_n); the pair (psi, -psi*) obeys the same one-step
    matrix S(alpha_n, z) from (1, -1).
    """
    z = complex(z)
    alphas = _alpha_array(source, 0, N)
    if kind == "first":
        a, b = _kernels.szego_track(alphas, z, 1.0 + 0.0j, 1.0 + 0.0j)
        return SolutionTrack("poly_first", z, 0, 1, a, b)
    if kind == "second":
        a, b = _kernels.szego_track(alphas, z, 1.0 + 0.0j, -1.0 + 0.0j)
        return SolutionTrack("poly_second", z, 0, 1, a, -b)
    raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")


def szego_track_values(source: CoefficientSource, z: complex,
                       a0: complex, b0: complex, N: int):
    """Propagate an arbitrary pair by S(alpha_0..alpha_{N-1}, z).

    Returns the two component arrays of length N+1. Seed (1+beta, -1+beta)
    gives the combination (psi, -psi*) + beta (phi, phi*), square-summable
    exactly when beta is the half-line Carathéodory boundary value.
    """
    alphas = _alpha_array(source, 0, N)
    return _kernels.szego_track(alphas, complex(z), complex(a0), complex(b0))


_GZ_SEEDS_PLUS = {"first": (1.0, 1.0), "second": (1.0, -1.0)}  # at even n0 = 0
_GZ_SEEDS_MINUS = {"first": (-1.0, 1.0), "second": (1.0, 1.0)}  # at odd n0 = -1


def gz_track(source: CoefficientSource, z: complex, side: str, kind: str, N: int) -> SolutionTrack:
    """Two-component track of the eigenvalue recursion.

    side 'plus': starts at n0 = 0 with seeds (1,1) / (1,-1), runs up to n = N.
    side 'minus': starts at n0 = -1 with seeds (-1,1) / (1,1), runs down to
    n = -N-1 through inverse steps.
    """
    z = complex(z)
    if kind not in ("first", "second"):
        raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")
    if side == "plus":
        u0, v0 = _GZ_SEEDS_PLUS[kind]
        alphas = _alpha_array(source, 0, N)
        u, v = _kernels.gz_track_up(alphas, z, u0, v0, 0)
        flavor = "gz_plus" if kind == "first" else "gz_plus_second"
        return SolutionTrack(flavor, z, 0, 1, u, v)
    if side == "minus":
        u0, v0 = _GZ_SEEDS_MINUS[kind]
        # downward steps from -1 apply the inverses at n = -2, -3, ...
        alphas = np.array([source.alpha_at(-2 - j) for j in range(N)], dtype=np.complex128)
        u, v = _kernels.gz_track_down(alphas, z, u0, v0, 0)
        flavor = "gz_minus" if kind == "first" else "gz_minus_second"
        return SolutionTrack(flavor, z, -1, -1, u, v)
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def omega_track(source: CoefficientSource, z: complex, omega: float, N: int,
                side: str = "plus", kind: str = "first") -> SolutionTrack:
    """Boundary-parameter family of polynomial tracks.

    kind 'first' starts from (e^{i w}, e^{-i w}); at w = 0 it reproduces
    polynomials(first). kind 'second' starts the raw propagated pair from
    (e^{i w}, -e^{-i w}); at w = 0 it reproduces polynomials(second).
    side 'minus' runs the same family over the reflected coefficients and
    reports it on the left indices n = -1, -2, ... (value at -n-1 equals the
    reflected track at n).
    """
    z = complex(z)
    if not (0.0 <= omega < math.pi):
        raise ValueError("omega must lie in [0, pi)")
    if side == "minus":
        tr = omega_track(reflect(source), z, omega, N, side="plus", kind=kind)
        return SolutionTrack(tr.flavor + "_minus", z, -1, -1, tr.first, tr.second, omega)
    ew = complex(math.cos(omega), math.sin(omega))
    alphas = _alpha_array(source, 0, N)
    if kind == "first":
        a, b = _kernels.szego_track(alphas, z, ew, ew.conjugate())
        return SolutionTrack("omega_family", z, 0, 1, a, b, omega)
    if kind == "second":
        a, b = _kernels.szego_track(alphas, z, ew, -ew.conjugate())
        return SolutionTrack("omega_family_second", z, 0, 1, a, -b, omega)
    raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")


def dump_track_csv(track: SolutionTrack, path) -> None:
    """CSV dump: n, re/im of each component."""
    idx = track.indices()
    with open(path, "w") as fh:
        fh.write("n,re_first,im_first,re_second,im_second\n")
        for k, n in enumerate(idx):
            f = track.first[k]
            s = track.second[k]
            fh.write(f"{n},{f.real!r},{f.imag!r},{s.real!r},{s.imag!r}\n")

"""Carathéodory functions of the half-lines and the whole line.

Evaluation strategy: every value is the Borel transform of a truncation's
spectral measure. The banded LU solve computes that exact number through the
resolvent column identity F = 1 + 2z <anchor, (U - z)^{-1} anchor>, which is
the eigen-expansion of the same sum, so the dense eigendecomposition stays
reserved for the independent oracle (f_whole_oracle, spectral_measure).

Truncation conventions: the plus half-line is cut with -1 at the origin and
+1 at the far end; the reflected half-line used for the minus side is cut
with +1 at its origin (the image of the origin cut under index reversal) and
+1 at the far end. With those phases the whole-line formula agrees with the
extended-window resolvent exactly at matched windows, not just in the limit.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np
from scipy.linalg import solve_banded

from .coeffs import CoefficientSource, reflect
from .operator import TruncatedOperator, build_extended, build_half_line_plus, spectral_measure

__all__ = [
    "CaratheodoryValue",
    "RadialTrace",
    "f_plus",
    "f_minus",
    "m_minus",
    "m_minus_to_f_minus",
    "f_whole",
    "f_whole_oracle",
    "m00",
    "rotate_omega",
    "rotate_omega_inverse",
    "caratheodory_value",
    "matched_window",
    "radial_scan",
    "adaptive_value",
]

POLE_EPS = 1e-12  # |F_plus - M_minus| below this marks the sample unusable
N_INIT = 64
N_MAX = 4096
STAB_TOL = 1e-8


@dataclasses.dataclass(frozen=True)
class CaratheodoryValue:
    z: complex
    f_plus: complex
    f_minus: complex
    m_minus: complex
    f_whole: complex
    truncation_N: int
    stabilization_residual: float
    near_pole: bool = False
    pole_gap: float = float("inf")  # |f_plus - m_minus| diagnostic


def _halfline_op(source, N, origin_phase, boundary_phase):
    op = build_half_line_plus(source, N, boundary_phase)
    if origin_phase == -1.0:
        return op
    # re-cut the origin: only the two alpha_{-1}-dependent entries of row 0 change
    ab = op.ab.copy()
    a0 = complex(source.alpha_at(0))
    rho0 = math.sqrt(max(0.0, 1.0 - abs(a0) ** 2))
    ab[2, 0] = -a0.conjugate() * complex(origin_phase)
    ab[3, 0] = -rho0 * complex(origin_phase)
    return TruncatedOperator(op.window, op.flavor, (complex(origin_phase), op.boundary_phases[1]), ab)


def _resolvent_diag(op: TruncatedOperator, z: complex, row: int) -> complex:
    """<delta_row, (U - z)^{-1} delta_row> by banded LU on the five-diagonal."""
    ab = op.ab.copy()
    ab[2, :] -= z
    rhs = np.zeros(op.dim, dtype=np.complex128)
    rhs[row] = 1.0
    return complex(solve_banded((2, 2), ab, rhs)[row])


def f_plus(source: CoefficientSource, z: complex, N: int,
           boundary_phase=1.0, origin_phase=-1.0, method: str = "banded") -> complex:
    """Half-line Carathéodory function at truncation size N.

    Value of the Borel transform of the N-truncation's spectral measure
    anchored at index 0; F(0) = 1 (probability mass).
    """
    z = complex(z)
    op = _halfline_op(source, N, complex(origin_phase), complex(boundary_phase))
    if method == "eig":
        return spectral_measure(op, [0]).borel(z)
    if method != "banded":
        raise ValueError(f"unknown method {method!r}")
    return 1.0 + 2.0 * z * _resolvent_diag(op, z, 0)


def f_minus(source: CoefficientSource, z: complex, N: int, method: str = "banded") -> complex:
    """Left Carathéodory function: minus the plus-side value of the reflected
    coefficients, with the origin cut at +1 (see module docstring)."""
    return -f_plus(reflect(source), z, N, boundary_phase=1.0, origin_phase=+1.0, method=method)


def _m_minus_from_f(f_min: complex, alpha_m1: complex) -> complex:
    ac = alpha_m1.conjugate()
    num = (1.0 - ac).real + 1j * (1.0 + ac).imag * f_min
    den = 1j * (1.0 - ac).imag + (1.0 + ac).real * f_min
    if den == 0:
        return complex(math.inf, 0.0)
    return num / den


def m_minus(source: CoefficientSource, z: complex, N: int, method: str = "banded") -> complex:
    """Anti-Carathéodory function of the left half-line seen from the origin."""
    fm = f_minus(source, z, N, method=method)
    return _m_minus_from_f(fm, complex(source.alpha_at(-1)))


def m_minus_to_f_minus(m: complex, alpha_m1: complex) -> complex:
    """Invert the Möbius map tying the two left-side function conventions."""
    ac = complex(alpha_m1).conjugate()
    den = (1.0 + ac).real * m - 1j * (1.0 + ac).imag
    if den == 0:
        return complex(math.inf, 0.0)
    return ((1.0 - ac).real - 1j * (1.0 - ac).imag * m) / den


def _f_whole_from(fp: complex, mm: complex, a0: complex, z: complex) -> complex:
    a0c = a0.conjugate()
    rho2 = 1.0 - abs(a0) ** 2
    num = (a0c + 2.0 * z + a0 * z * z) \
        + (a0 * z * z - a0c) * (mm + fp) \
        + (a0c - 2.0 * z + a0 * z * z) * mm * fp
    den = rho2 * z * (fp - mm)
    if den == 0:
        return complex(math.inf, 0.0)
    return -1.0 + num / den


def f_whole(source: CoefficientSource, z: complex, N: int) -> complex:
    """Whole-line Carathéodory function through the two half-line functions."""
    z = complex(z)
    fp = f_plus(source, z, N)
    mm = m_minus(source, z, N)
    return _f_whole_from(fp, mm, complex(source.alpha_at(0)), z)


def m00(source: CoefficientSource, z: complex, N: int) -> complex:
    """Diagonal Borel transform anchored at index 0 only; oracle cross-check.

    Closed form 1 + (1 - F+)(1 + M-)/(F+ - M-); equals the delta_0 spectral
    sum of the matched extended window exactly.
    """
    z = complex(z)
    fp = f_plus(source, z, N)
    mm = m_minus(source, z, N)
    den = fp - mm
    if den == 0:
        return complex(math.inf, 0.0)
    return 1.0 + (1.0 - fp) * (1.0 + mm) / den


def matched_window(N: int):
    """Extended window whose restriction reproduces the two half-line cuts."""
    return (-N - 1, N)


def f_whole_oracle(source: CoefficientSource, z: complex, window,
                   phase_left=-1.0, phase_right=1.0) -> complex:
    """Brute-force spectral sum over an extended truncation, anchors {0, 1}.

    Raw Borel transform of the mass-2 anchored measure; relates to the
    whole-line formula by oracle = f_whole + 1 at matched windows (the mass
    excess of the anchor set enters the transform as its constant term).
    """
    lo, hi = window
    op = build_extended(source, lo, hi, phase_left, phase_right)
    return spectral_measure(op, [0, 1]).borel(complex(z))


def caratheodory_value(source: CoefficientSource, z: complex, N: int,
                       residual: float = math.inf) -> CaratheodoryValue:
    z = complex(z)
    fp = f_plus(source, z, N)
    fm = f_minus(source, z, N)
    mm = _m_minus_from_f(fm, complex(source.alpha_at(-1)))
    gap = abs(fp - mm)
    fw = _f_whole_from(fp, mm, complex(source.alpha_at(0)), z)
    return CaratheodoryValue(z, fp, fm, mm, fw, N, residual,
                             near_pole=gap < POLE_EPS, pole_gap=gap)


def adaptive_value(source: CoefficientSource, z: complex,
                   n_init: int = N_INIT, n_max: int = N_MAX,
                   tol: float = STAB_TOL) -> CaratheodoryValue:
    """Double N until the whole-line value stabilizes or n_max is reached.

    Stabilization is |v(2N) - v(N)| < tol * max(1, |v(2N)|): absolute in the
    O(1) regime, relative where the value is exploding toward a pole.
    """
    z = complex(z)
    N = max(8, n_init)
    prev = caratheodory_value(source, z, N)
    while N < n_max:
        N = min(2 * N, n_max)
        cur = caratheodory_value(source, z, N)
        ref = max(1.0, abs(cur.f_whole)) if math.isfinite(abs(cur.f_whole)) else 1.0
        diff = abs(cur.f_whole - prev.f_whole)
        resid = diff / ref if math.isfinite(diff) else math.inf
        cur = dataclasses.replace(cur, stabilization_residual=resid)
        if resid < tol:
            return cur
        prev = cur
    return prev


def rotate_omega(value: complex, omega: float, which: str = "f_plus") -> complex:
    """Boundary-parameter Möbius rotation, identical shape for both inputs:
    F_w = (i sin w - F cos w)/(-cos w + i F sin w)."""
    if which not in ("f_plus", "m_minus"):
        raise ValueError(f"which must be 'f_plus' or 'm_minus', got {which!r}")
    c, s = math.cos(omega), math.sin(omega)
    den = -c + 1j * value * s
    if den == 0:
        return complex(math.inf, 0.0)
    return (1j * s - value * c) / den


def rotate_omega_inverse(value: complex, omega: float, which: str = "f_plus") -> complex:
    """Inverse of rotate_omega (the Möbius coefficient matrix inverted)."""
    if which not in ("f_plus", "m_minus"):
        raise ValueError(f"which must be 'f_plus' or 'm_minus', got {which!r}")
    c, s = math.cos(omega), math.sin(omega)
    den = -1j * value * s - c
    if den == 0:
        return complex(math.inf, 0.0)
    return (-value * c - 1j * s) / den


@dataclasses.dataclass(frozen=True)
class RadialTrace:
    theta: float
    r_values: np.ndarray
    values: tuple  # CaratheodoryValue per r
    limit_estimates: dict

    def f_plus_trace(self):
        return np.array([v.f_plus for v in self.values])

    def m_minus_trace(self):
        return np.array([v.m_minus for v in self.values])

    def f_whole_trace(self):
        return np.array([v.f_whole for v in self.values])

    def to_jsonl(self, fh) -> None:
        for r, v in zip(self.r_values, self.values):
            rec = {
                "theta": self.theta,
                "r": float(r),
                "f_plus": [v.f_plus.real, v.f_plus.imag],
                "m_minus": [v.m_minus.real, v.m_minus.imag],
                "f_whole": [v.f_whole.real, v.f_whole.imag],
                "N": v.truncation_N,
                "residual": v.stabilization_residual,
            }
            fh.write(json.dumps(rec) + "\n")

    def csv_rows(self):
        for r, v in zip(self.r_values, self.values):
            yield (self.theta, float(r), v.f_whole.real, v.f_whole.imag,
                   v.f_plus.real, v.f_plus.imag, v.m_minus.real, v.m_minus.imag)


def _aitken(values):
    v0, v1, v2 = values[-3], values[-2], values[-1]
    d2 = v2 - 2.0 * v1 + v0
    if abs(d2) < 1e-14 * max(1.0, abs(v2)):
        return v2
    return v2 - (v2 - v1) ** 2 / d2


def _limit_estimate(rs, vals, residuals, tol=STAB_TOL, div_threshold=1e4):
    """Limit of a radial trace using only the N-stabilized prefix."""
    ok = [k for k in range(len(vals))
          if residuals[k] < tol and math.isfinite(abs(vals[k]))]
    if not ok:
        return {"value": [math.nan, math.nan], "confidence": "oscillating"}
    # longest stabilized prefix: once N caps out, trailing radii are excluded
    prefix = []
    for k in range(len(vals)):
        if k in ok:
            prefix.append(k)
        else:
            break
    use = prefix if len(prefix) >= 2 else ok
    seq = [vals[k] for k in use]
    last = seq[-1]
    if abs(last.real) > div_threshold:
        return {"value": [last.real, last.imag], "confidence": "divergent"}
    if len(seq) >= 2 and abs(seq[-1] - seq[-2]) < 1e-6 * max(1.0, abs(last)):
        return {"value": [last.real, last.imag], "confidence": "stabilized"}
    if len(seq) >= 3:
        deltas = [abs(seq[k + 1] - seq[k]) for k in range(len(seq) - 3, len(seq) - 1)]
        if deltas[1] < deltas[0]:
            ext = _aitken(seq)
            return {"value": [ext.real, ext.imag], "confidence": "extrapolated"}
    return {"value": [last.real, last.imag], "confidence": "oscillating"}


def radial_scan(source: CoefficientSource, theta: float, r_schedule,
                n_init: int = N_INIT, n_max: int = N_MAX, tol: float = STAB_TOL,
                div_threshold: float = 1e4) -> RadialTrace:
    """Evaluate the Carathéodory chain along z = r e^{i theta}.

    N adapts per radius, warm-started from the previous radius; divergence is
    data, never an exception. limit_estimates carry one record per function
    with a {stabilized, extrapolated, oscillating, divergent} flag.
    """
    rs = np.asarray(sorted(r_schedule), dtype=float)
    zdir = complex(math.cos(theta), math.sin(theta))
    values = []
    n_start = n_init
    for r in rs:
        v = adaptive_value(source, r * zdir, n_init=n_start, n_max=n_max, tol=tol)
        values.append(v)
        n_start = max(n_init, v.truncation_N // 2)
    residuals = [v.stabilization_residual for v in values]
    limits = {
        "f_plus": _limit_estimate(rs, [v.f_plus for v in values], residuals, tol, div_threshold),
        "m_minus": _limit_estimate(rs, [v.m_minus for v in values], residuals, tol, div_threshold),
        "f_whole": _limit_estimate(rs, [v.f_whole for v in values], residuals, tol, div_threshold),
    }
    return RadialTrace(theta, rs, tuple(values), limits)

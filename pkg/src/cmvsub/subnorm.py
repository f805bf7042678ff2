"""Local solution norms, the scale equation, and subordinacy detection.

The scale x(r) is defined by (1 - r) * ||u||_x * ||p||_x = sqrt(2). On the
unit circle the pair (u, p) has |u(n)| * |p(n)| >= 1 pointwise (constant
Wronskian), so the squared-norm product grows at least like x^2 and the
equation always has a solution with x <= sqrt(2)/(1 - r); the bracket search
below exploits that bound. When the product cannot reach the target within
the track-length cap the failure is reported as ScaleUnboundedError, the
numerical signature of two square-summable solutions (a point-mass
candidate).
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .coeffs import CoefficientSource
from .recursion import gz_track
from . import mfun

__all__ = [
    "NeedsExtensionError",
    "ScaleUnboundedError",
    "JLScale",
    "SubordinacyVerdict",
    "local_norm",
    "jl_scale",
    "subordinacy_ratio",
    "detect_subordinate",
]

TRACK_CAP = 1 << 23  # hard memory bound on bracket extension


class NeedsExtensionError(ValueError):
    """Track too short for the requested norm; carries the needed length."""

    def __init__(self, required_length: int):
        self.required_length = required_length
        super().__init__(f"track needs at least {required_length} values")


class ScaleUnboundedError(RuntimeError):
    """Scale equation had no solution within the track cap."""

    def __init__(self, r: float, side: int, reached: float, target: float):
        self.r = r
        self.side = side
        self.reached = reached
        self.target = target
        super().__init__(
            f"scale equation unsolved at r={r} side={side:+d}: "
            f"norm product reached {reached:.3e} of target {target:.3e}")


def _sq_norm(sq, t: float) -> float:
    """Sum_{j<=[t]} sq[j] + (t - [t]) * sq[[t]+1] on a downward-or-upward array."""
    if t < 0:
        raise ValueError("norm parameter must be nonnegative in track order")
    m = int(math.floor(t))
    frac = t - m
    need = m + 2 if frac > 0 else m + 1
    if need > len(sq):
        raise NeedsExtensionError(need)
    total = float(np.sum(sq[: m + 1]))
    if frac > 0:
        total += frac * float(sq[m + 1])
    return total


def local_norm(values, x: float, side: str = "right") -> float:
    """Interpolated l2 norm of a solution restricted to [0, x] or [x, -1].

    Right side: values[j] is the solution at site j, x >= 0. Left side:
    values[k] is the solution at site -1-k (downward order), x <= -1. Linear
    interpolation of the squared norm between integer cutoffs, so the result
    is continuous in x.
    """
    sq = np.abs(np.asarray(values)) ** 2
    if side == "right":
        if x < 0:
            raise ValueError("right-side norm needs x >= 0")
        return math.sqrt(_sq_norm(sq, x))
    if side == "left":
        if x > -1:
            raise ValueError("left-side norm needs x <= -1")
        return math.sqrt(_sq_norm(sq, -1.0 - x))
    raise ValueError(f"side must be 'right' or 'left', got {side!r}")


@dataclasses.dataclass(frozen=True)
class JLScale:
    r: float
    side: int
    omega: float
    x: float            # signed norm cutoff: >= 0 on the right, <= -1 on the left
    u_norm: float
    p_norm: float
    residual: float     # |(1-r) * u_norm * p_norm - sqrt(2)|
    track_length: int


def _omega_tracks(source: CoefficientSource, z: complex, side: int,
                  omega: float, length: int):
    """First components of u_omega, p_omega as arrays in track order."""
    u = gz_track(source, z, "plus" if side > 0 else "minus", "first", length)
    p = gz_track(source, z, "plus" if side > 0 else "minus", "second", length)
    if omega == 0.0:
        return u.first, p.first
    c, s = math.cos(omega), math.sin(omega)
    return c * u.first + 1j * s * p.first, c * p.first + 1j * s * u.first


def jl_scale(source: CoefficientSource, z: complex, r: float,
             side: int = +1, omega: float = 0.0) -> JLScale:
    """Solve (1 - r) ||u_w||_x ||p_w||_x = sqrt(2) for the cutoff x.

    z is the boundary point e^{i theta}; r < 1 sets the target. The squared
    norms are piecewise linear in x, their product piecewise quadratic, so
    after bracketing the integer cell the root is exact to rounding.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("r must lie in [0, 1)")
    if side not in (+1, -1):
        raise ValueError("side must be +1 or -1")
    target = 2.0 / (1.0 - r) ** 2
    length = min(TRACK_CAP, max(64, int(math.ceil(math.sqrt(2.0) / (1.0 - r))) + 16))
    while True:
        uo, po = _omega_tracks(source, z, side, omega, length)
        squ = np.abs(uo) ** 2
        sqp = np.abs(po) ** 2
        cumu = np.cumsum(squ)
        cump = np.cumsum(sqp)
        # growing tracks can push the product past the double range; inf
        # entries only ever sit in the monotone tail beyond the bracket
        with np.errstate(over="ignore"):
            g = cumu * cump
        idx = int(np.searchsorted(g, target, side="left"))
        if idx >= len(g):
            if length >= TRACK_CAP:
                raise ScaleUnboundedError(r, side, float(g[-1]), target)
            length = min(TRACK_CAP, 2 * length)
            continue
        break
    if idx == 0:
        t = 0.0
        m = 0
        a, b = float(cumu[0]), float(cump[0])
    else:
        m = idx - 1
        a, b = float(cumu[m]), float(cump[m])
        su, sp = float(squ[m + 1]), float(sqp[m + 1])
        c0 = a * b - target
        beta = a * sp + b * su
        quad = su * sp
        disc = beta * beta - 4.0 * quad * c0
        root = math.sqrt(max(0.0, disc))
        if beta + root == 0.0:
            t = 0.0
        else:
            t = -2.0 * c0 / (beta + root)
        t = min(1.0, max(0.0, t))
        a += su * t
        b += sp * t
    x_param = m + t
    u_norm = math.sqrt(a)
    p_norm = math.sqrt(b)
    residual = abs((1.0 - r) * u_norm * p_norm - math.sqrt(2.0))
    x = x_param if side > 0 else -1.0 - x_param
    return JLScale(r, side, omega, x, u_norm, p_norm, residual, len(squ))


def subordinacy_ratio(source: CoefficientSource, z: complex, r: float,
                      side: int = +1, omega: float = 0.0) -> float:
    """||p_w|| / ||u_w|| at the scale x(r); comparable to the half-line
    Carathéodory modulus |F(r z)| within a universal constant."""
    jl = jl_scale(source, z, r, side, omega)
    if jl.u_norm == 0.0:
        return math.inf
    return jl.p_norm / jl.u_norm


@dataclasses.dataclass(frozen=True)
class SubordinacyVerdict:
    kind: str                     # no_subordinate | subordinate | point_candidate | undecided
    side: int
    omega: float | None
    limit: complex | None
    confidence: str
    diagnostics: tuple

    def to_json(self) -> str:
        rec = {
            "kind": self.kind,
            "side": self.side,
            "omega": self.omega,
            "limit": None if self.limit is None else [self.limit.real, self.limit.imag],
            "confidence": self.confidence,
            "diagnostics": list(self.diagnostics),
        }
        return json.dumps(rec)


def _decay_tail_ratio(source: CoefficientSource, z: complex, side: int,
                      omega: float, length: int) -> float:
    uo, _ = _omega_tracks(source, z, side, omega, length)
    sq = np.abs(uo) ** 2
    total = float(np.sum(sq))
    if total == 0.0:
        return 0.0
    tail = float(np.sum(sq[3 * len(sq) // 4:]))
    return tail / total


def detect_subordinate(source: CoefficientSource, theta: float, side: int = +1,
                       r_schedule=None, estimator=None, eps_re: float = 1e-3,
                       blowup: float = 1e3, decay_tol: float = 1e-3,
                       n_max: int = 4096) -> SubordinacyVerdict:
    """Classify the boundary point by the radial trend of the half-line
    Carathéodory estimate.

    estimator(source, theta, r_array) -> complex array overrides the built-in
    adaptive evaluation (diagnostics and fault injection); its values are
    taken at face value.
    """
    if side not in (+1, -1):
        raise ValueError("side must be +1 or -1")
    if r_schedule is None:
        r_schedule = [1.0 - 2.0 ** (-k) for k in range(3, 21)]
    rs = np.asarray(sorted(r_schedule), dtype=float)
    key = "f_plus" if side > 0 else "m_minus"
    if estimator is not None:
        vals = np.asarray(estimator(source, theta, rs), dtype=np.complex128)
        residuals = [0.0] * len(vals)
        limit = mfun._limit_estimate(rs, list(vals), residuals)
        diags = [{"r": float(r), "value": [v.real, v.imag], "residual": 0.0}
                 for r, v in zip(rs, vals)]
    else:
        scan = mfun.radial_scan(source, theta, rs, n_max=n_max)
        limit = scan.limit_estimates[key]
        vals = scan.f_plus_trace() if side > 0 else scan.m_minus_trace()
        diags = [{"r": float(r), "value": [v.real, v.imag],
                  "residual": c.stabilization_residual}
                 for r, v, c in zip(rs, vals, scan.values)]
    conf = limit["confidence"]
    lv = complex(limit["value"][0], limit["value"][1])
    z = complex(math.cos(theta), math.sin(theta))
    # orient: plus-side F has Re > 0, minus-side M has Re < 0
    re_oriented = lv.real if side > 0 else -lv.real
    if conf == "oscillating":
        return SubordinacyVerdict("undecided", side, None, lv, conf, tuple(diags))
    if conf == "divergent" or abs(lv) > blowup:
        omega = 0.0
        tail = _decay_tail_ratio(source, z, side, omega, n_max)
        kind = "point_candidate" if tail < decay_tol else "subordinate"
        return SubordinacyVerdict(kind, side, omega, lv, conf, tuple(diags))
    if abs(lv.real) < eps_re:
        # purely imaginary limit -i cot(w): w = atan2(1, -Im) in (0, pi)
        omega = math.atan2(1.0, -lv.imag)
        tail = _decay_tail_ratio(source, z, side, omega, n_max)
        kind = "point_candidate" if tail < decay_tol else "subordinate"
        return SubordinacyVerdict(kind, side, omega, lv, conf, tuple(diags))
    if re_oriented > eps_re:
        return SubordinacyVerdict("no_subordinate", side, None, lv, conf, tuple(diags))
    return SubordinacyVerdict("undecided", side, None, lv, conf, tuple(diags))

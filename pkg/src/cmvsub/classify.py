"""Spectral classification of boundary points by subordinacy evidence.

Verdict vocabulary is deliberately conservative: "point_candidate" never
claims an eigenvalue, and "singular" without decay evidence is only
consistent with singular continuous behavior, never a determination. The
decision table consumes radial limits of the two half-line functions, the
whole-line Carathéodory trend, transfer-matrix growth, and a truncation
eigenvalue oracle for gaps; a bounded transfer cocycle on either side vetoes
any singular verdict (bounded solutions force pure absolute continuity).
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .coeffs import CoefficientSource, Constant, QuasiPeriodic, reflect
from .operator import build_extended, spectral_measure
from .recursion import transfer_log_norms, szego_track_values
from . import mfun, subnorm

__all__ = [
    "ClassifyParams",
    "SpectralClassification",
    "GrowthReport",
    "EllipticityReport",
    "ConjugacyReport",
    "UnsupportedConfigurationError",
    "classify_point",
    "classify_grid",
    "bounded_transfer_check",
    "ellipticity_check",
    "verify_conjugacy",
    "verdict_csv_header",
    "verdict_csv_row",
]


class UnsupportedConfigurationError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class ClassifyParams:
    k_min: int = 3
    k_max: int = 20
    n_init: int = 64
    n_max: int = 4096
    tol: float = 1e-8
    eps_re: float = 1e-3          # Re-positivity margin
    div_threshold: float = 1e4    # Re F blowup marking singular mass
    blowup: float = 1e3           # joint half-line divergence level
    agree_tol: float = 0.05       # equality tolerance for the two limits
    gap_sep: float = 1e-3         # lower bound on |F+ - M-| off the spectrum
    gap_angle: float = 0.02       # oracle weight window around theta (rad)
    gap_weight_tol: float = 1e-4
    gap_oracle_N: int = 256
    decay_N: int = 2048
    decay_tol: float = 1e-3       # tail-sum ratio for matched solutions
    boundary_margin: float = 0.05
    transfer_slope_tol: float = 1e-3
    transfer_sup_log: float = math.log(1e8)
    jl_probe_r: float = 0.99
    f_scale: float = 1.0          # test hook: decisions must not depend on it

    def r_schedule(self):
        return [1.0 - 2.0 ** (-k) for k in range(self.k_min, self.k_max + 1)]


@dataclasses.dataclass(frozen=True)
class GrowthReport:
    kind: str        # bounded | growing | inconclusive
    rate: float      # Lyapunov slope estimate (log units per step)
    sup_log: float
    n_used: int


@dataclasses.dataclass(frozen=True)
class SpectralClassification:
    theta: float
    verdict: str     # ac | singular | point_candidate | gap | undetermined
    evidence: dict
    confidence: str  # stabilized | extrapolated | oscillating

    def to_json(self) -> str:
        return json.dumps({
            "theta": self.theta,
            "verdict": self.verdict,
            "confidence": self.confidence,
            "evidence": self.evidence,
        })


def _fit_growth(logn: np.ndarray, slope_tol: float, sup_log: float) -> GrowthReport:
    n = len(logn)
    half = n // 2
    xs = np.arange(half, n, dtype=float)
    slope = float(np.polyfit(xs, logn[half:], 1)[0]) if n - half >= 2 else 0.0
    sup = float(np.max(logn)) if n else 0.0
    total = float(logn[-1] - logn[half]) if n - half >= 2 else 0.0
    if slope > slope_tol and total > 2.0:
        return GrowthReport("growing", slope, sup, n)
    if sup < sup_log and slope < slope_tol:
        return GrowthReport("bounded", max(0.0, slope), sup, n)
    return GrowthReport("inconclusive", slope, sup, n)


def bounded_transfer_check(source: CoefficientSource, theta: float,
                           N_max: int = 4096, slope_tol: float = 1e-3,
                           sup_log: float = math.log(1e8)) -> dict:
    """Transfer-norm growth on each half line at z = e^{i theta}.

    Log-scaled accumulation, so no overflow at any growth rate. "bounded"
    on either side is later used as a veto on singular verdicts.
    """
    if N_max < 32:
        raise ValueError("N_max must be at least 32")
    z = complex(math.cos(theta), math.sin(theta))
    out = {}
    for label, side in (("plus", +1), ("minus", -1)):
        logn = transfer_log_norms(source, N_max, z, side=side)
        out[label] = _fit_growth(np.asarray(logn, dtype=float), slope_tol, sup_log)
    return out


def _matched_tail_ratio(source: CoefficientSource, z: complex, beta: complex,
                        length: int) -> float:
    """Tail mass of the Szego pair (psi, -psi*) + beta (phi, phi*).

    The pair is square-summable iff beta is the half-line Carathéodory
    boundary value, so a small tail ratio is decay evidence for the matched
    solution.
    """
    a, b = szego_track_values(source, z, complex(1.0 + beta), complex(-1.0 + beta), length)
    sq = np.abs(a) ** 2 + np.abs(b) ** 2
    total = float(np.sum(sq))
    if not math.isfinite(total) or total == 0.0:
        return 1.0
    tail = float(np.sum(sq[3 * len(sq) // 4:]))
    return tail / total


def _anchored_weight_near(source: CoefficientSource, theta: float,
                          N: int, window_rad: float) -> float:
    lo, hi = mfun.matched_window(N)
    op = build_extended(source, lo, hi, -1.0, 1.0)
    meas = spectral_measure(op, [0, 1])
    d = np.angle(np.exp(1j * (meas.eigenangles - theta)))
    return float(np.sum(meas.weights[np.abs(d) < window_rad]))


def _limit(rec):
    return complex(rec["value"][0], rec["value"][1]), rec["confidence"]


def _aggregate_confidence(confs) -> str:
    # a cleanly divergent trace is decisive evidence, grade it as stabilized
    grade = {"stabilized": 0, "divergent": 0, "extrapolated": 1, "oscillating": 2}
    worst = max(grade.get(c, 2) for c in confs)
    return ("stabilized", "extrapolated", "oscillating")[worst]


def classify_point(source: CoefficientSource, theta: float,
                   params: ClassifyParams = ClassifyParams()) -> SpectralClassification:
    """Decision table over radial limits, growth rates, and the gap oracle."""
    scan = mfun.radial_scan(source, theta, params.r_schedule(),
                            n_init=params.n_init, n_max=params.n_max,
                            tol=params.tol, div_threshold=params.div_threshold)
    lp, conf_p = _limit(scan.limit_estimates["f_plus"])
    lm, conf_m = _limit(scan.limit_estimates["m_minus"])
    lf, conf_f = _limit(scan.limit_estimates["f_whole"])
    growth = bounded_transfer_check(source, theta, params.n_max,
                                    params.transfer_slope_tol, params.transfer_sup_log)

    # last radius where the truncation stabilized in N: divergence readings
    stab = [v for v in scan.values
            if v.stabilization_residual < params.tol and math.isfinite(abs(v.f_whole))]
    last = stab[-1] if stab else scan.values[-1]
    re_f_last = last.f_whole.real * params.f_scale
    gap_last = last.pole_gap

    z = complex(math.cos(theta), math.sin(theta))
    jl = {}
    for label, side in (("plus", +1), ("minus", -1)):
        try:
            s = subnorm.jl_scale(source, z, params.jl_probe_r, side=side)
            jl[label] = {"x": s.x, "ratio": (s.p_norm / s.u_norm) if s.u_norm else math.inf,
                         "residual": s.residual}
        except subnorm.ScaleUnboundedError as err:
            jl[label] = {"scale_unbounded": True, "reached": err.reached}

    f_diverges = conf_f == "divergent" or re_f_last > params.div_threshold * params.f_scale
    p_im = abs(lp.real) < params.eps_re and conf_p in ("stabilized", "extrapolated")
    m_im = abs(lm.real) < params.eps_re and conf_m in ("stabilized", "extrapolated")
    p_div = conf_p == "divergent" or (abs(lp) > params.blowup and conf_p != "oscillating")
    m_div = conf_m == "divergent" or (abs(lm) > params.blowup and conf_m != "oscillating")

    verdict = "undetermined"
    evidence = {
        "f_plus_limit": [lp.real, lp.imag], "f_plus_confidence": conf_p,
        "m_minus_limit": [lm.real, lm.imag], "m_minus_confidence": conf_m,
        "f_whole_limit": [lf.real, lf.imag], "f_whole_confidence": conf_f,
        "re_f_last_stabilized": re_f_last,
        "re_f_trend": [[float(r), float(v.f_whole.real)]
                       for r, v in list(zip(scan.r_values, scan.values))[-3:]],
        "pole_gap_last": gap_last,
        "growth_plus": dataclasses.asdict(growth["plus"]),
        "growth_minus": dataclasses.asdict(growth["minus"]),
        "jl": jl,
    }

    ac_side = (conf_p in ("stabilized", "extrapolated") and lp.real > params.eps_re) or \
              (conf_m in ("stabilized", "extrapolated") and -lm.real > params.eps_re)
    f_finite_pos = (not f_diverges) and re_f_last > 0 and \
        conf_f in ("stabilized", "extrapolated")

    if ac_side and f_finite_pos:
        verdict = "ac"
    elif f_diverges and ((p_im and m_im and abs(lp - lm) < params.agree_tol)
                         or (p_div and m_div)):
        verdict = "singular"
        beta_plus = lp
        f_min = mfun.m_minus_to_f_minus(lm, complex(source.alpha_at(-1)))
        beta_minus = -f_min  # reflected-side boundary value
        tail_p = _matched_tail_ratio(source, z, beta_plus, params.decay_N)
        tail_m = _matched_tail_ratio(reflect(source), z, beta_minus, params.decay_N)
        evidence["matched_tail_plus"] = tail_p
        evidence["matched_tail_minus"] = tail_m
        if tail_p < params.decay_tol and tail_m < params.decay_tol:
            verdict = "point_candidate"
    elif (not f_diverges) and conf_f in ("stabilized", "extrapolated") \
            and gap_last > params.gap_sep:
        wt = _anchored_weight_near(source, theta, params.gap_oracle_N, params.gap_angle)
        evidence["oracle_weight_near"] = wt
        if wt < params.gap_weight_tol:
            verdict = "gap"

    if verdict in ("singular", "point_candidate") and \
            (growth["plus"].kind == "bounded" or growth["minus"].kind == "bounded"):
        # bounded solutions on a half line force pure absolute continuity
        evidence["coherence_guard"] = True
        verdict = "undetermined"

    confidence = _aggregate_confidence([conf_p, conf_m, conf_f])
    return SpectralClassification(theta, verdict, evidence, confidence)


def _grid_worker(args):
    source, theta, params = args
    return classify_point(source, theta, params)


def classify_grid(source: CoefficientSource, theta_count: int,
                  params: ClassifyParams = ClassifyParams(),
                  jobs: int = 1) -> list:
    """Uniform grid theta_j = 2 pi j / count; order and content independent
    of the worker count (each point is pure, reassembled in grid order)."""
    if theta_count < 1:
        raise ValueError("theta_count must be at least 1")
    thetas = [2.0 * math.pi * j / theta_count for j in range(theta_count)]
    tasks = [(source, t, params) for t in thetas]
    if jobs <= 1:
        results = [_grid_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_grid_worker, tasks))
    for c in results:
        if c.verdict in ("singular", "point_candidate"):
            g = c.evidence
            assert not (g["growth_plus"]["kind"] == "bounded"
                        or g["growth_minus"]["kind"] == "bounded")
    return results


@dataclasses.dataclass(frozen=True)
class EllipticityReport:
    kind: str        # elliptic | hyperbolic | parabolic
    trace: float
    arc_edges: tuple


def ellipticity_check(source: CoefficientSource, theta: float,
                      parabolic_tol: float = 1e-9) -> EllipticityReport:
    """Trace test for the constant one-step cocycle z^{-1/2} S(alpha, z).

    Only constant coefficients make the rotated step matrix literally
    constant; anything else needs a conjugacy supplied by the caller (see
    verify_conjugacy).
    """
    if not isinstance(source, Constant):
        raise UnsupportedConfigurationError(
            "ellipticity_check needs a Constant source; use verify_conjugacy "
            "with an explicit conjugacy for anything else")
    alpha = complex(source.alpha)
    rho = math.sqrt(max(0.0, 1.0 - abs(alpha) ** 2))
    if rho == 0.0:
        raise UnsupportedConfigurationError("|alpha| = 1 has no transfer matrix")
    t = 2.0 * math.cos(theta / 2.0) / rho
    edge = 2.0 * math.acos(min(1.0, rho))
    edges = (edge, 2.0 * math.pi - edge)
    if abs(abs(t) - 2.0) <= parabolic_tol:
        kind = "parabolic"
    elif abs(t) < 2.0:
        kind = "elliptic"
    else:
        kind = "hyperbolic"
    return EllipticityReport(kind, t, edges)


@dataclasses.dataclass(frozen=True)
class ConjugacyReport:
    verified: bool
    residual: float
    power_bound: float
    trace_abs: float
    witness: dict | None


def _cocycle_data(source: CoefficientSource):
    """(alpha(omega), translation step, base phase) for sources with a
    torus-dynamics presentation of their coefficients."""
    if isinstance(source, Constant):
        a = complex(source.alpha)
        return (lambda w: a), 0.0, 0.0
    if isinstance(source, QuasiPeriodic):
        lam = source.coupling
        return (lambda w: lam * np.exp(2j * math.pi * w)), source.frequency, source.phase
    raise UnsupportedConfigurationError(
        f"no cocycle presentation for {type(source).__name__}")


def verify_conjugacy(source: CoefficientSource, theta: float, B, A0,
                     sample_count: int = 256, tol: float = 1e-8) -> ConjugacyReport:
    """Check A_z(omega) = B(T omega) A0 B(omega)^{-1} on sampled phases.

    B maps a phase in [0, 1) to an invertible 2x2 array; A0 is the candidate
    constant matrix. Power boundedness of A0 is probed to n = 2^14 > 10^4 by
    repeated squaring (log-free: the 2x2 norms stay representable whenever
    the answer is interesting).
    """
    alpha_of, step, base = _cocycle_data(source)
    z = complex(math.cos(theta), math.sin(theta))
    zr = np.exp(-0.5j * theta)
    A0 = np.asarray(A0, dtype=complex)
    worst = 0.0
    witness = None
    for k in range(sample_count):
        w = (base + k / sample_count) % 1.0
        a = alpha_of(w)
        rho = math.sqrt(max(0.0, 1.0 - abs(a) ** 2))
        if rho == 0.0:
            raise UnsupportedConfigurationError("|alpha(omega)| = 1 on a sample")
        Az = zr / rho * np.array([[z, -np.conj(a)], [-a * z, 1.0]], dtype=complex)
        Bw = np.asarray(B(w), dtype=complex)
        Bt = np.asarray(B((w + step) % 1.0), dtype=complex)
        resid = float(np.linalg.norm(Az - Bt @ A0 @ np.linalg.inv(Bw), 2))
        if resid > worst:
            worst = resid
            witness = {"omega": w, "residual": resid}
    power = A0.copy()
    bound = float(np.linalg.norm(power))
    for _ in range(14):
        with np.errstate(over="ignore", invalid="ignore"):
            power = power @ power
        if not np.all(np.isfinite(power)):
            bound = math.inf
            break
        bound = max(bound, float(np.linalg.norm(power)))
        if bound > 1e100:
            bound = math.inf
            break
    verified = worst <= tol
    return ConjugacyReport(verified, worst, bound, float(abs(np.trace(A0))),
                           None if verified else witness)


def verdict_csv_header() -> str:
    return "theta,verdict,ReF_limit,lyap_plus,lyap_minus,confidence"


def verdict_csv_row(c: SpectralClassification) -> str:
    ev = c.evidence
    return (f"{c.theta:.12g},{c.verdict},{ev['f_whole_limit'][0]:.12g},"
            f"{ev['growth_plus']['rate']:.12g},{ev['growth_minus']['rate']:.12g},"
            f"{c.confidence}")

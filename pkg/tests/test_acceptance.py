"""End-to-end acceptance checks.

One test per numbered criterion from the README's acceptance list; each
prints a single line "criterion N (<name>): PASS - <figures>" (visible
under -s or -rA) and enforces its wall-time budget. Expected values are
either exact algebra, closed-form free-case facts, or independently
computed oracles (dense eigensolves, spectral measures); nothing is
tuned to the implementation under test.
"""

import cmath
import json
import math
import time

import numpy as np

from cmvsub import mfun, subnorm
from cmvsub.classify import classify_grid, ellipticity_check
from cmvsub.coeffs import Constant, QuasiPeriodic, RandomIID, reflect
from cmvsub.operator import (
    build_extended,
    build_half_line_plus,
    lm_factorize,
    spectral_measure,
    theta_block,
)
from cmvsub.recursion import (
    gz_matrix,
    gz_track,
    polynomials,
    szego_matrix,
    transfer_log_norms,
)

SQRT3_2 = math.sqrt(3.0) / 2.0

# grids computed in criteria 4 and 5, re-examined by criterion 8
_GRIDS = {}


def _report(num, name, detail, t0, budget):
    dt = time.perf_counter() - t0
    print(f"criterion {num} ({name}): PASS - {detail} [{dt:.1f}s of {budget:.0f}s]")
    assert dt <= budget, f"criterion {num} exceeded its {budget:.0f}s budget ({dt:.1f}s)"


def _corpus(rng, count):
    out = []
    for _ in range(count):
        pick = rng.integers(0, 3)
        if pick == 0:
            out.append(RandomIID(seed=int(rng.integers(0, 2**31)),
                                 radius=float(rng.uniform(0.2, 0.65))))
        elif pick == 1:
            out.append(QuasiPeriodic(float(rng.uniform(0.1, 0.65)),
                                     float(rng.uniform(0.05, 0.95)),
                                     float(rng.uniform(0.0, 1.0))))
        else:
            out.append(Constant(complex(rng.uniform(-0.6, 0.6),
                                        rng.uniform(-0.6, 0.6))))
    return out


def test_criterion_1_algebraic_invariants():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        a = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        z = complex((0.5 + rng.uniform(0.0, 1.0))
                    * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        s = np.asarray(szego_matrix(a, z).entries)
        worst = max(worst, abs(np.linalg.det(s) - z))
        for parity in ("even", "odd"):
            m = np.asarray(gz_matrix(a, z, parity).entries)
            worst = max(worst, abs(np.linalg.det(m) + 1.0))
        blk = theta_block(a)
        worst = max(worst, float(np.max(np.abs(blk @ blk.conj().T - np.eye(2)))))
    assert worst < 1e-13
    _report(1, "algebraic invariants", f"1000 draws, max residual {worst:.2e}", t0, 1.0)


def test_criterion_2_track_polynomial_relations():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    n_top = 30
    worst_rel = 0.0
    worst_w = 0.0
    for src in _corpus(rng, 50):
        z = cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        u = gz_track(src, z, "plus", "first", n_top)
        p = gz_track(src, z, "plus", "second", n_top)
        phi = polynomials(src, z, n_top, "first")
        psi = polynomials(src, z, n_top, "second")
        for n in range(n_top + 1):
            if n % 2 == 0:
                zp = z ** (-(n // 2))
                ref = (zp * phi.first[n], zp * phi.second[n],
                       zp * psi.first[n], -zp * psi.second[n])
            else:
                zu = z ** (-((n + 1) // 2))
                zv = z ** (-((n - 1) // 2))
                ref = (zu * phi.second[n], zv * phi.first[n],
                       -zu * psi.second[n], zv * psi.first[n])
            got = (u.first[n], u.second[n], p.first[n], p.second[n])
            scale = 1.0 + max(abs(r) for r in ref)
            worst_rel = max(worst_rel,
                            max(abs(g - r) for g, r in zip(got, ref)) / scale)
        # conserved pairing: |u q - p v| = 2 along the track; the computed
        # quantity is a cancellation of two growing products, so the
        # attainable accuracy is eps * |u||p|, normalized out here
        w = u.first * p.second - p.first * u.second
        drift = np.abs(np.abs(w) - 2.0) / (1.0 + np.abs(u.first) * np.abs(p.first))
        worst_w = max(worst_w, float(np.max(drift)))
    assert worst_rel < 1e-10
    assert worst_w < 1e-11
    _report(2, "track against polynomials",
            f"50 sources, n <= {n_top}: relation {worst_rel:.2e}, "
            f"pairing drift {worst_w:.2e}", t0, 10.0)


def test_criterion_3_factorization_unitarity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    srcs = _corpus(rng, 6)
    worst_uni = 0.0
    for src in srcs:
        for N in (16, 64, 256, 512):  # dims 17 .. 513
            worst_uni = max(worst_uni,
                            build_half_line_plus(src, N).unitarity_residual())
        for half in (64, 256):
            op = build_extended(src, -half - 1, half, -1.0, 1.0)
            worst_uni = max(worst_uni, op.unitarity_residual())
    assert worst_uni < 1e-12

    worst_lm = 0.0
    for src in srcs[:3]:
        for window in ((0, 255), (0, 511), (-256, 255)):
            if window[0] == 0:
                op = build_half_line_plus(src, window[1])
            else:
                op = build_extended(src, window[0], window[1], -1.0, 1.0)
            L, M = lm_factorize(src, window, phase_left=-1.0, phase_right=1.0)
            diff = np.abs(L @ M - op.to_dense())
            worst_lm = max(worst_lm, float(np.max(diff[1:-1, :])))
    assert worst_lm < 1e-13
    _report(3, "factorization and unitarity",
            f"windows to 513: unitarity {worst_uni:.2e}, interior split {worst_lm:.2e}",
            t0, 10.0)


def test_criterion_4_free_end_to_end():
    t0 = time.perf_counter()
    free = Constant(0.0)
    worst = 0.0
    for r in (0.5, 0.75, 0.875, 0.9375, 0.96875, 0.99):
        for theta in (0.0, 1.1, 2.7, 4.3):
            z = r * cmath.exp(1j * theta)
            v = mfun.adaptive_value(free, z, n_init=16, n_max=4096, tol=1e-10)
            worst = max(worst, abs(v.f_plus - 1.0), abs(v.m_minus + 1.0),
                        abs(v.f_whole - 1.0))
    assert worst < 1e-6

    grid = classify_grid(free, 64, jobs=8)
    _GRIDS["free"] = grid
    assert [c.verdict for c in grid] == ["ac"] * 64

    worst_log = 0.0
    for theta in (0.0, 1.234, 3.5):
        z = cmath.exp(1j * theta)
        for side in (+1, -1):
            logs = transfer_log_norms(free, 4096, z, side=side)
            worst_log = max(worst_log, float(np.max(np.abs(logs))))
    assert worst_log < 1e-12
    _report(4, "free case end to end",
            f"values off by {worst:.2e}, 64/64 ac, log-norms {worst_log:.2e}",
            t0, 60.0)


def test_criterion_5_constant_half_benchmark():
    t0 = time.perf_counter()
    src = Constant(0.5)
    grid = classify_grid(src, 64, jobs=8)
    _GRIDS["half"] = grid

    margin = 0.05
    for j, c in enumerate(grid):
        theta = 2.0 * math.pi * j / 64
        cc = abs(math.cos(theta / 2.0))
        if cc < SQRT3_2 - margin:
            assert c.verdict == "ac", f"j={j}: {c.verdict}"
        elif cc > SQRT3_2 + margin:
            assert c.verdict == "gap", f"j={j}: {c.verdict}"
        else:
            assert c.verdict in ("ac", "gap", "undetermined"), f"j={j}: {c.verdict}"

        # trace test against the measured growth, skipping exact parabolic hits
        rep = ellipticity_check(src, theta)
        growth = (c.evidence["growth_plus"]["kind"],
                  c.evidence["growth_minus"]["kind"])
        if rep.kind == "elliptic":
            assert growth == ("bounded", "bounded"), f"j={j}: {growth}"
        elif rep.kind == "hyperbolic":
            assert growth == ("growing", "growing"), f"j={j}: {growth}"

    lo, hi = mfun.matched_window(1024)
    op = build_extended(src, lo, hi, -1.0, 1.0)
    meas = spectral_measure(op, [0, 1])
    in_gap = (meas.eigenangles < math.pi / 3.0) | (meas.eigenangles > 5.0 * math.pi / 3.0)
    spill = float(np.sum(meas.weights[in_gap]))
    assert spill <= 1e-2
    _report(5, "constant coupling benchmark",
            f"64-point split exact, trace/growth agree, spillover mass {spill:.2e}",
            t0, 300.0)


def test_criterion_6_oracle_equivalence():
    t0 = time.perf_counter()
    N = 256
    window = mfun.matched_window(N)
    free = Constant(0.0)
    z0 = 0.9 * cmath.exp(0.4j)
    # one-time calibration on the free case: the whole-line function and
    # the mass-2 anchor transform differ by a constant offset
    cal = mfun.f_whole_oracle(free, z0, window) - mfun.f_whole(free, z0, N)
    assert abs(cal - 1.0) < 1e-9

    rng = np.random.default_rng(606)
    worst_f = 0.0
    worst_m = 0.0
    for src in _corpus(rng, 50):
        z = 0.9 * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        fw = mfun.f_whole(src, z, N)
        orc = mfun.f_whole_oracle(src, z, window)
        worst_f = max(worst_f, abs(fw + cal - orc))
        op = build_extended(src, window[0], window[1], -1.0, 1.0)
        borel0 = spectral_measure(op, [0]).borel(z)
        worst_m = max(worst_m, abs(mfun.m00(src, z, N) - borel0))
    assert worst_f < 1e-6
    assert worst_m < 1e-6
    _report(6, "independent oracle equivalence",
            f"offset {cal.real:.6f}{cal.imag:+.1e}i, whole-line {worst_f:.2e}, "
            f"anchor {worst_m:.2e}", t0, 300.0)


def test_criterion_7_norm_scale_boundedness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    srcs = _corpus(rng, 25)
    radii = (0.9, 0.96875, 0.9921875, 0.99609375)
    angles = [float(rng.uniform(0.0, 2.0 * math.pi)) for _ in range(5)]

    q_lo, q_hi = math.inf, 0.0
    worst_res = 0.0
    count = 0
    for src in srcs:
        for theta in angles:
            zb = cmath.exp(1j * theta)
            for r in radii:
                s = subnorm.jl_scale(src, zb, r, side=+1)
                worst_res = max(worst_res, s.residual)
                ratio = s.p_norm / s.u_norm
                N = min(8192, max(512, int(25.0 / (1.0 - r))))
                fp = mfun.f_plus(src, r * zb, N)
                q = ratio / abs(fp)
                q_lo, q_hi = min(q_lo, q), max(q_hi, q)
                count += 1
    A = max(q_hi, 1.0 / q_lo)
    assert count >= 500
    assert worst_res < 1e-10
    assert A <= 100.0

    worst_lr = 0.0
    for src in srcs:
        mirror = reflect(src)
        for r in radii:
            left = subnorm.jl_scale(src, cmath.exp(0.9j), r, side=-1)
            right = subnorm.jl_scale(mirror, cmath.exp(0.9j), r, side=+1)
            # the two cutoffs solve independently rounded quadratics
            worst_lr = max(worst_lr,
                           abs(left.x + 1.0 + right.x) / (1.0 + abs(right.x)))
            scale = 1.0 + right.u_norm + right.p_norm
            worst_lr = max(worst_lr,
                           abs(left.u_norm - right.p_norm) / scale,
                           abs(left.p_norm - right.u_norm) / scale)
    assert worst_lr < 1e-10
    _report(7, "norm-scale boundedness",
            f"{count} samples, ratio envelope A = {A:.2f}, residual {worst_res:.2e}, "
            f"mirror gap {worst_lr:.2e}", t0, 300.0)


def test_criterion_8_growth_verdict_coherence():
    t0 = time.perf_counter()
    pts = _GRIDS.get("free", []) + _GRIDS.get("half", [])
    assert len(pts) == 128, "needs the grids from criteria 4 and 5"
    violations = []
    for c in pts:
        bounded = (c.evidence["growth_plus"]["kind"] == "bounded"
                   or c.evidence["growth_minus"]["kind"] == "bounded")
        if bounded and c.verdict in ("singular", "point_candidate"):
            violations.append(c.theta)
    assert violations == []
    _report(8, "bounded growth forbids singular verdicts",
            f"{len(pts)} classified points, 0 violations", t0, 60.0)


def test_criterion_9_parallel_determinism():
    t0 = time.perf_counter()
    serial = classify_grid(Constant(0.5), 16, jobs=1)
    pooled = classify_grid(Constant(0.5), 16, jobs=8)
    a = [json.dumps(json.loads(c.to_json()), sort_keys=True) for c in serial]
    b = [json.dumps(json.loads(c.to_json()), sort_keys=True) for c in pooled]
    assert a == b
    _report(9, "parallel determinism", "16-point sweep byte-identical at 1 and 8 workers",
            t0, 120.0)

"""Batch front-end: config-driven sweeps with machine-readable reports.

Exit codes: 0 success, 2 configuration error (field named in the message),
3 numerical backend failure. selftest exits 1 when a check fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import classify as _classify
from . import mfun, recursion
from .coeffs import Constant, source_from_dict

OUTPUT_DIR_ENV = "CMVSUB_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def _require(cond: bool, field: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"config field {field!r}: {msg}")


def _as_int(d, field, default=None, low=None):
    v = d.get(field.split(".")[-1], default)
    _require(v is not None, field, "missing")
    _require(isinstance(v, int) and not isinstance(v, bool), field, "must be an integer")
    if low is not None:
        _require(v >= low, field, f"must be >= {low}")
    return v


class RunConfig:
    """Validated run configuration; see load_config for the schema."""

    def __init__(self, source, theta_grid, r_schedule, n_init, n_max, tol,
                 report_path, trace_path, seed, raw):
        self.source = source
        self.theta_grid = theta_grid      # int count or explicit list
        self.r_schedule = r_schedule
        self.n_init = n_init
        self.n_max = n_max
        self.tol = tol
        self.report_path = report_path
        self.trace_path = trace_path
        self.seed = seed
        self.raw = raw
        canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
        self.config_hash = hashlib.sha256(canon.encode()).hexdigest()[:12]

    def params(self) -> _classify.ClassifyParams:
        return _classify.ClassifyParams(n_init=self.n_init, n_max=self.n_max, tol=self.tol)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path!r}: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path!r} is not valid JSON: line {err.lineno}: {err.msg}")
    _require(isinstance(raw, dict), "<root>", "must be a JSON object")
    _require("model" in raw, "model", "missing (the only field without a default)")
    try:
        source = source_from_dict(raw["model"])
    except (KeyError, TypeError, ValueError) as err:
        raise ConfigError(f"config field 'model': {err}")

    tg = raw.get("theta_grid", 16)
    if isinstance(tg, list):
        _require(len(tg) >= 1, "theta_grid", "list must be non-empty")
        _require(all(isinstance(t, (int, float)) for t in tg), "theta_grid",
                 "list entries must be numbers")
        theta_grid = [float(t) for t in tg]
    else:
        _require(isinstance(tg, int) and not isinstance(tg, bool) and tg >= 1,
                 "theta_grid", "must be a positive integer count or a list of angles")
        theta_grid = tg

    rs = raw.get("r_schedule", {"geometric": {"k_max": 20}})
    if isinstance(rs, list):
        _require(all(isinstance(r, (int, float)) and 0 <= r < 1 for r in rs),
                 "r_schedule", "list entries must lie in [0, 1)")
        _require(len(rs) >= 2, "r_schedule", "need at least 2 radii")
        r_schedule = sorted(float(r) for r in rs)
    else:
        _require(isinstance(rs, dict) and "geometric" in rs, "r_schedule",
                 "must be a list of radii or {'geometric': {'k_max': K}}")
        k_max = _as_int(rs["geometric"], "r_schedule.geometric.k_max", default=20, low=2)
        _require(k_max <= 48, "r_schedule.geometric.k_max", "must be <= 48")
        r_schedule = [1.0 - 2.0 ** (-k) for k in range(3, k_max + 1)]

    tr = raw.get("truncation", {})
    _require(isinstance(tr, dict), "truncation", "must be an object")
    n_init = _as_int(tr, "truncation.N_init", default=64, low=8)
    n_max = _as_int(tr, "truncation.N_max", default=4096, low=8)
    _require(n_max >= n_init, "truncation.N_max", f"must be >= N_init ({n_init})")
    tol = tr.get("tol", 1e-8)
    _require(isinstance(tol, (int, float)) and 0 < tol < 1, "truncation.tol",
             "must be a number in (0, 1)")

    out = raw.get("outputs", {})
    _require(isinstance(out, dict), "outputs", "must be an object")
    report_path = out.get("report", "report.jsonl")
    trace_path = out.get("trace", "trace.csv")
    _require(isinstance(report_path, str), "outputs.report", "must be a path string")
    _require(isinstance(trace_path, str), "outputs.trace", "must be a path string")

    seed = raw.get("seed", 0)
    _require(isinstance(seed, int) and not isinstance(seed, bool), "seed",
             "must be an integer")
    return RunConfig(source, theta_grid, r_schedule, n_init, n_max, float(tol),
                     report_path, trace_path, seed, raw)


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _check_overwrite(paths, force: bool):
    for path in paths:
        resolved = _resolve_output(path)
        if os.path.exists(resolved) and not force:
            raise ConfigError(f"output {resolved!r} exists; pass --force to overwrite")


def _open_for_write(path: str, force: bool):
    path = _resolve_output(path)
    if os.path.exists(path) and not force:
        raise ConfigError(f"output {path!r} exists; pass --force to overwrite")
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return open(path, "w")


def run_classify(config: RunConfig, theta_override=None, jobs: int = 1,
                 force: bool = False) -> int:
    csv_path = os.path.splitext(config.report_path)[0] + ".csv"
    _check_overwrite([config.report_path, csv_path], force)
    thetas = config.theta_grid
    if theta_override is not None:
        thetas = theta_override
    params = config.params()
    if isinstance(thetas, int):
        results = _classify.classify_grid(config.source, thetas, params, jobs=jobs)
    else:
        tasks = [(config.source, t, params) for t in thetas]
        if jobs <= 1:
            results = [_classify._grid_worker(t) for t in tasks]
        else:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_classify._grid_worker, tasks))
    with _open_for_write(config.report_path, force) as fh:
        for c in results:
            rec = json.loads(c.to_json())
            rec["config_hash"] = config.config_hash
            fh.write(json.dumps(rec) + "\n")
    with _open_for_write(csv_path, force) as fh:
        fh.write(_classify.verdict_csv_header() + ",config_hash\n")
        for c in results:
            fh.write(_classify.verdict_csv_row(c) + f",{config.config_hash}\n")
    return 0


def run_trace(config: RunConfig, theta: float, force: bool = False) -> int:
    if not (0.0 <= theta < 2.0 * math.pi):
        raise ConfigError(f"--theta must lie in [0, 2*pi), got {theta}")
    trace = mfun.radial_scan(config.source, theta, config.r_schedule,
                             n_init=config.n_init, n_max=config.n_max,
                             tol=config.tol)
    with _open_for_write(config.trace_path, force) as fh:
        fh.write("theta,r,re_f,im_f,re_fplus,im_fplus,re_mminus,im_mminus,config_hash\n")
        for row in trace.csv_rows():
            fh.write(",".join(f"{v:.12g}" for v in row) + f",{config.config_hash}\n")
        # footer metadata: limit flags and the gap signature when present
        lim = trace.limit_estimates
        fh.write(f"# config_hash: {config.config_hash}\n")
        for key in ("f_plus", "m_minus", "f_whole"):
            rec = lim[key]
            fh.write(f"# {key}_limit: {rec['value'][0]:.12g}{rec['value'][1]:+.12g}i"
                     f" ({rec['confidence']})\n")
        # resolvent-set flag: the whole-line limit settles, neither side
        # carries an absolutely continuous limit, and the half-line
        # functions stay separated (read at the last radius where the
        # truncation stabilized; the final rows can sit near a spurious
        # pole of the truncation)
        stab = [v for v in trace.values
                if v.stabilization_residual < config.tol
                and math.isfinite(abs(v.f_whole))]
        last = stab[-1] if stab else trace.values[-1]
        ac_side = any(
            lim[key]["confidence"] in ("stabilized", "extrapolated")
            and sign * lim[key]["value"][0] > 1e-3
            for key, sign in (("f_plus", 1.0), ("m_minus", -1.0)))
        gap_sig = (lim["f_whole"]["confidence"] in ("stabilized", "extrapolated")
                   and not ac_side and last.pole_gap > 1e-3)
        if gap_sig:
            fh.write("# gap_signature: Re F settles with |F_plus - M_minus| "
                     f"bounded below ({last.pole_gap:.3g})\n")
    return 0


def _selftest_checks(inject_fault: bool = False):
    """One tuple per check: (name, callable -> max residual, tolerance)."""
    z = complex(0.6, 0.3)
    zc = complex(math.cos(1.3), math.sin(1.3))
    alpha = complex(0.4, -0.2)
    src = source_from_dict({"kind": "random_iid", "seed": 9, "radius": 0.6})

    def det_szego():
        m = recursion.szego_matrix(alpha, z)
        e = np.asarray(m.entries, dtype=complex).copy()
        if inject_fault:
            e[0, 1] = -e[0, 1]
        return abs(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0] - z)

    def det_gz():
        worst = 0.0
        for parity in ("even", "odd"):
            m = recursion.gz_matrix(alpha, z, parity)
            worst = max(worst, abs(np.linalg.det(np.asarray(m.entries)) + 1.0))
        return worst

    def wronskian():
        u = recursion.gz_track(src, zc, "plus", "first", 64)
        p = recursion.gz_track(src, zc, "plus", "second", 64)
        w = u.first * p.second - p.first * u.second
        # the conserved pairing is a cancellation of growing products, so
        # normalize the drift by their size
        scale = 1.0 + np.abs(u.first) * np.abs(p.first)
        return float(np.max(np.abs(np.abs(w) - 2.0) / scale))

    def unitarity():
        from .operator import build_half_line_plus
        op = build_half_line_plus(src, 32)
        return op.unitarity_residual()

    def gz_szego():
        # plus-side track against polynomial branches with the z-power removed
        u = recursion.gz_track(src, zc, "plus", "first", 32)
        phi = recursion.polynomials(src, zc, 32, "first")
        worst = 0.0
        for n in range(33):
            if n % 2 == 0:
                ref = zc ** (-(n // 2)) * phi.first[n]
            else:
                ref = zc ** (-((n + 1) // 2)) * phi.second[n]
            worst = max(worst, abs(u.first[n] - ref))
        return worst

    def free_oracle():
        free = Constant(0.0)
        zz = 0.7 * np.exp(0.9j)
        F = mfun.f_whole(free, complex(zz), 64)
        orc = mfun.f_whole_oracle(free, complex(zz), mfun.matched_window(64))
        return max(abs(F - 1.0), abs(orc - 2.0))

    return [
        ("szego-determinant", det_szego, 1e-12),
        ("gz-determinant", det_gz, 1e-12),
        ("wronskian-constancy", wronskian, 1e-10),
        ("truncation-unitarity", unitarity, 1e-12),
        ("gz-szego-relation", gz_szego, 1e-10),
        ("free-case-oracle", free_oracle, 1e-10),
    ]


def run_selftest(inject_fault: bool = False) -> int:
    failed = []
    for name, fn, tol in _selftest_checks(inject_fault):
        try:
            resid = fn()
            ok = resid < tol
        except Exception:  # a crash is a failure, not an abort
            resid = math.inf
            ok = False
        status = "pass" if ok else "FAIL"
        print(f"{status}  {name}  residual={resid:.3e}  tol={tol:.0e}")
        if not ok:
            failed.append(name)
    if failed:
        print("failed checks: " + ", ".join(failed))
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cmvsub",
        description="Spectral classification sweeps for five-diagonal unitary "
                    "operators defined by reflection coefficients.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="run the verdict sweep from a config")
    p_cls.add_argument("--config", required=True)
    p_cls.add_argument("--theta", type=int, default=None,
                       help="override the grid point count")
    p_cls.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p_cls.add_argument("--force", action="store_true",
                       help="overwrite existing outputs")

    p_tr = sub.add_parser("trace", help="radial trace at a single angle")
    p_tr.add_argument("--config", required=True)
    p_tr.add_argument("--theta", type=float, required=True)
    p_tr.add_argument("--force", action="store_true")

    p_st = sub.add_parser("selftest", help="run embedded invariant checks")
    p_st.add_argument("--inject-fault", action="store_true",
                      help="debug: flip a sign in the one-step matrix")

    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return run_selftest(inject_fault=args.inject_fault)
        config = load_config(args.config)
        if args.command == "classify":
            return run_classify(config, theta_override=args.theta,
                                jobs=args.jobs, force=args.force)
        return run_trace(config, args.theta, force=args.force)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, ArithmeticError) as err:
        print(f"numerical backend failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

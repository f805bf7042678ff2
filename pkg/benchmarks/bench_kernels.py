"""Compare the compiled recurrence kernels against the pure-Python fallback.

Runs each kernel on identical inputs under both backends, reports per-step
timings and the speedup, and cross-checks that the outputs agree bit for
bit (they share the operation order by design; agreement is only promised
while values stay finite, so the inputs sit in the bounded regime - a
constant coupling at an angle inside its essential arc - and never
overflow at any length).

Usage: python benchmarks/bench_kernels.py [--length N] [--repeats K]
"""

import argparse
import time

import numpy as np

from cmvsub import _kernels


def _inputs(length):
    alpha = np.full(length, 0.5 + 0.0j, dtype=np.complex128)
    z = complex(np.exp(2.5j))  # |cos(1.25)| = 0.32 < rho: bounded track
    return alpha, z


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=200_000,
                    help="track length (default 200000)")
    ap.add_argument("--repeats", type=int, default=5,
                    help="best-of repeats per case (default 5)")
    args = ap.parse_args(argv)

    alpha, z = _inputs(args.length)
    cases = [
        ("szego_track", lambda mod: mod.szego_track(alpha, z, 1.0 + 0j, 1.0 + 0j)),
        ("gz_track_up", lambda mod: mod.gz_track_up(alpha, z, 1.0 + 0j, -1.0 + 0j, 0)),
        ("gz_track_down", lambda mod: mod.gz_track_down(alpha, z, 1.0 + 0j, 1.0 + 0j, 1)),
        ("lognorm_scan", lambda mod: mod.lognorm_scan(alpha, z)),
    ]

    if not _kernels.COMPILED:
        print("compiled extension not available; timing the fallback only")
    print(f"track length {args.length}, best of {args.repeats}")
    header = f"{'kernel':<16}{'pure':>12}{'compiled':>12}{'speedup':>10}  ns/step"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_pure, out_pure = _time(lambda: call(_kernels.pure), args.repeats)
        row = f"{name:<16}{t_pure * 1e3:>10.1f}ms"
        if _kernels.COMPILED:
            t_fast, out_fast = _time(lambda: call(_kernels), args.repeats)
            flat_p = np.concatenate([np.atleast_1d(np.asarray(o)).ravel()
                                     for o in (out_pure if isinstance(out_pure, tuple)
                                               else (out_pure,))])
            flat_f = np.concatenate([np.atleast_1d(np.asarray(o)).ravel()
                                     for o in (out_fast if isinstance(out_fast, tuple)
                                               else (out_fast,))])
            if not np.array_equal(flat_p, flat_f):
                raise SystemExit(f"{name}: backend outputs differ")
            row += (f"{t_fast * 1e3:>10.1f}ms{t_pure / t_fast:>9.1f}x"
                    f"{t_fast / args.length * 1e9:>9.1f}")
        else:
            row += f"{'-':>12}{'-':>10}{t_pure / args.length * 1e9:>9.1f}"
        print(row)
    if _kernels.COMPILED:
        print("outputs bit-identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Compare the compiled and pure-Python Newton kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--starts N] [--repeat R]

Each backend runs the same seeded starts on a few Bethe systems; the table
reports the best-of-R wall time per start, the speedup, and whether the
two backends found the same distinct roots. Individual starts may end
differently, since the backends sum in different orders.
"""
import argparse
import sys
import time

import numpy as np

from gaudin_wronski import kernels
from gaudin_wronski.bethe import ModelConfig, _start_point, orbit_distance

CASES = [
    ((1, 1), (0, 1), 1),
    ((1, 1, 1, 1), (0, 1, 3, -2 + 1j), 2),
    ((2, 1, 2, 1), (0, 1, 1j, -2), 3),
    ((3, 3, 3, 3, 3), (0, 1, 2j, -1.5, 2 + 1j), 6),
]


def run_starts(impl, cfg, starts, seed=1):
    z, m = cfg.z_array, cfg.m_array
    center = complex(z.mean())
    spread = float(np.abs(z - center).max()) or 1.0
    out = []
    for i in range(starts):
        t0 = _start_point(seed, i, cfg.k, center, 3.0 * spread)
        out.append(impl.newton_bethe(z, m, t0, center, 3e3 * spread, 1e-9 * spread, 1e-11, 100))
    return out


def distinct_roots(results, eps=1e-7):
    found = []
    for t, status, _, _ in results:
        if status == kernels.OK and all(orbit_distance(t, u) >= eps for u in found):
            found.append(t)
    return found


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    print(f"{'instance':<28} {'python us/start':>16} {'cython us/start':>16} {'speedup':>8} {'agree':>6}")
    for m, z, k in CASES:
        cfg = ModelConfig.build(m, z, k)
        times, results = {}, {}
        for name in ("python", "cython"):
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[name] = run_starts(backends[name], cfg, args.starts)
                best = min(best, time.perf_counter() - t0)
            times[name] = best / args.starts * 1e6
        a, b = distinct_roots(results["python"]), distinct_roots(results["cython"])
        agree = len(a) == len(b) and all(min(orbit_distance(x, y) for y in b) < 1e-8 for x in a)
        label = f"M={m} k={k}"
        print(f"{label:<28} {times['python']:>16.1f} {times['cython']:>16.1f} "
              f"{times['python'] / times['cython']:>7.1f}x {str(agree):>6}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

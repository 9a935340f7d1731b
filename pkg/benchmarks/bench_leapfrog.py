"""Benchmark the leapfrog impulse-response kernel: numba path vs numpy fallback.

Run:  python benchmarks/bench_leapfrog.py [--sites N] [--steps T] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from qcausal import _kernels


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sites", type=int, default=512)
    ap.add_argument("--steps", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    n, t = args.sites, args.steps
    mass = 1.0

    results = {}
    results["numpy"] = min(
        timeit.repeat(
            lambda: _kernels._impulse_response_numpy(n, t, mass),
            number=1,
            repeat=args.repeat,
        )
    )
    if _kernels.HAS_NUMBA:
        _kernels.impulse_response(n, t, mass)  # compile outside the timer
        results["numba"] = min(
            timeit.repeat(
                lambda: _kernels.impulse_response(n, t, mass),
                number=1,
                repeat=args.repeat,
            )
        )
        same = np.array_equal(
            _kernels._impulse_response_numpy(n, t, mass),
            _kernels.impulse_response(n, t, mass),
        )
    else:
        same = True

    print(f"lattice {n} sites x {t} steps, mass {mass}")
    for name, sec in results.items():
        print(f"  {name:>6}: {sec * 1e3:8.2f} ms")
    if "numba" in results:
        print(f"  speedup: {results['numpy'] / results['numba']:.1f}x")
    print(f"  paths bit-identical: {same}")


if __name__ == "__main__":
    main()

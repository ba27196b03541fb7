"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one row per kernel with the best time of each backend and the
speed-up.  Backends that are not built are skipped.
"""
import argparse
import sys
import timeit

import numpy as np

from hsc import kernels
from hsc.model import build_model, periodic_orbit
from hsc.suspension import RoofFunction


def cases():
    rng = np.random.default_rng(0)
    roof = RoofFunction(2, 2, {"AA": 1, "AB": 1.5, "BA": 0.7, "BB": 1.2})
    traj = rng.random((1500, 20, 3))
    m = build_model(2, "1/5", [1, 1])
    a = periodic_orbit(m, "AABAB").vertices
    b = periodic_orbit(m, "ABBAB").vertices
    perm = rng.permutation(400).astype(np.int64)
    return {
        "fkm_necklaces L=2 T=16": lambda k: k.fkm_necklaces(2, 22, roof.table, roof.depth, 16.0, 1e-12),
        "greedy_cover 1500x20": lambda k: k.greedy_cover(traj, 0.6),
        "gauss_linking 320x320": lambda k: k.gauss_linking(a, b),
        "bounded_scan n=400": lambda k: k.bounded_scan(perm),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    names = sorted(kernels.BACKENDS)
    print(f"{'kernel':26s}" + "".join(f"{n:>12s}" for n in names) + f"{'speed-up':>10s}")
    for label, fn in cases().items():
        best = {}
        for n in names:
            mod = kernels.BACKENDS[n]
            best[n] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        ratio = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:26s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in names) + f"{ratio:9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

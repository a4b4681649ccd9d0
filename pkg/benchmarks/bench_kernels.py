"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--trials N]
"""

import argparse
import time

import numpy as np

from cmsearch import Matroid
from cmsearch.exante import exante_opt_cabinets
from cmsearch.generators import random_cabinets_instance
from cmsearch.kernels import pipage_sample, simulate_arena
from cmsearch.prophet import matroid_cabinets_plan


def _time(fn, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200_000)
    args = ap.parse_args(argv)

    m = Matroid.partition([[0, 1, 2], [3, 4, 5]], [2, 1])
    q = np.array([0.6, 0.7, 0.5, 0.3, 0.3, 0.2])
    inst = random_cabinets_instance(3, max_n=5)
    s = exante_opt_cabinets(inst)
    arena = matroid_cabinets_plan(inst, s.q, s.z, "exact").arena

    cases = {
        "pipage": lambda b: pipage_sample(m.rank_table, q, args.trials, 0, b),
        "arena": lambda b: simulate_arena(arena, args.trials, 0, b),
    }
    print(f"{'kernel':<8} {'numpy s':>9} {'numba s':>9} {'speedup':>8}  same")
    for name, run in cases.items():
        run("numba")  # compile
        tn, a = _time(lambda: run("numpy"))
        tj, b = _time(lambda: run("numba"))
        same = all(np.array_equal(x, y) for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
        print(f"{name:<8} {tn:>9.3f} {tj:>9.3f} {tn / tj:>7.1f}x  {same}")


if __name__ == "__main__":
    main()

"""Compiled vs numpy kernels on a disc-search sized workload.

Run with ``python3 benchmarks/bench_kernels.py [--members M] [--k-max K]``.
"""
import argparse
import itertools
import timeit

import numpy as np

from jordanbohr import _kernels_py
from jordanbohr.bohr_disc import DiscFamilySpec, default_r_grid

try:
    from jordanbohr import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def workload(members, k_max, seed=0):
    rng = np.random.default_rng(seed)
    fam = DiscFamilySpec("Fm", m=1, factors=2)
    t = np.linspace(-1.0, 0.995, int(np.sqrt(members)))
    params = np.array(list(itertools.product(t, repeat=2)))
    coeffs = fam.series(params, k_max)
    a = np.ascontiguousarray(rng.normal(size=coeffs.shape) + 1j * rng.normal(size=coeffs.shape))
    den = a.copy()
    den[:, 0] = 2.0
    mags = np.ascontiguousarray(np.abs(coeffs))
    tail = np.ascontiguousarray(1.0 - mags[:, 0] ** 2)
    return coeffs, a, den, mags, tail, default_r_grid()


def bench(mod, data, repeat):
    coeffs, a, den, mags, tail, r_grid = data
    cases = {
        "series_mul": lambda: mod.series_mul(coeffs, a),
        "series_recip": lambda: mod.series_recip(den),
        "majorant_crossings": lambda: mod.majorant_crossings(mags, tail, r_grid),
    }
    return {k: min(timeit.repeat(f, number=1, repeat=repeat)) for k, f in cases.items()}


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--members", type=int, default=10000)
    p.add_argument("--k-max", type=int, default=128)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    data = workload(args.members, args.k_max)
    py = bench(_kernels_py, data, args.repeat)
    print(f"members={len(data[0])} k_max={args.k_max} r_grid={len(data[5])}")
    if _kernels_c is None:
        print("compiled extension not built; numpy timings only")
        for k, v in py.items():
            print(f"{k:20s} numpy {v * 1e3:9.2f} ms")
        return
    c = bench(_kernels_c, data, args.repeat)
    print(f"{'kernel':20s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for k in py:
        print(f"{k:20s} {py[k] * 1e3:10.2f} {c[k] * 1e3:10.2f} {py[k] / c[k]:8.1f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

The same kernels are selected at import time by CRAFTSYNTH_BACKEND
(numba|numpy); here both variants are timed explicitly on identical
inputs, plus an end-to-end synthesis call under the active backend.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 10000 100000 --output bench.json
"""

import argparse
import json
import time

import numpy as np

from craftsynth._accel import NUMBA_AVAILABLE, USE_NUMBA
from craftsynth import kernels


def haar_batch(rng, n):
    z = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    out = np.empty_like(z)
    for i in range(n):
        q, r = np.linalg.qr(z[i])
        out[i] = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    return np.ascontiguousarray(out)


def time_fn(fn, *args, repeats=5):
    fn(*args)  # warm up (JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


KERNELS = [
    ("fingerprints",
     kernels.fingerprints_numba, kernels.fingerprints_numpy,
     lambda w, t: (w,)),
    ("adjoint_target_fingerprints",
     kernels.adjoint_target_fingerprints_numba,
     kernels.adjoint_target_fingerprints_numpy,
     lambda w, t: (w, t)),
    ("distances_to_target",
     kernels.distances_to_target_numba, kernels.distances_to_target_numpy,
     lambda w, t: (w, t)),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[10_000, 100_000, 500_000])
    ap.add_argument("--output", help="write results as JSON")
    args = ap.parse_args()

    print(f"numba available: {NUMBA_AVAILABLE}; active backend: "
          f"{'numba' if USE_NUMBA else 'numpy'}\n")
    rng = np.random.default_rng(0)
    target = haar_batch(rng, 1)[0]
    results = []
    header = f"{'kernel':>30} {'n':>9} {'numba (s)':>11} {'numpy (s)':>11} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        w = haar_batch(rng, n)
        for name, fn_nb, fn_np, pack in KERNELS:
            t_np = time_fn(fn_np, *pack(w, target))
            t_nb = time_fn(fn_nb, *pack(w, target)) if NUMBA_AVAILABLE else float("inf")
            speed = t_np / t_nb if t_nb > 0 else 0.0
            print(f"{name:>30} {n:>9} {t_nb:>11.5f} {t_np:>11.5f} {speed:>8.1f}x")
            results.append({"kernel": name, "n": n,
                            "numba_s": t_nb, "numpy_s": t_np})

    # end-to-end synthesis under the active backend
    from craftsynth.channels import rz
    from craftsynth.synthesis import SynthRequest, synth_su2

    synth_su2(SynthRequest(target=rz(0.31), epsilon=3e-3))  # warm tables
    t0 = time.perf_counter()
    res = synth_su2(SynthRequest(target=rz(1.2345), epsilon=3e-3))
    dt = time.perf_counter() - t0
    print(f"\nsynth_su2(Rz, eps=3e-3): tcount={res.tcount} in {dt:.3f}s "
          f"[{'numba' if USE_NUMBA else 'numpy'} backend]")
    results.append({"kernel": "synth_su2_eps3e-3", "n": 1,
                    "active_backend": "numba" if USE_NUMBA else "numpy",
                    "seconds": dt})

    if args.output:
        with open(args.output, "w") as fh:
            json.dump(results, fh, indent=1)
        print(f"results -> {args.output}")


if __name__ == "__main__":
    main()

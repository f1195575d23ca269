#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Run:  python benchmarks/bench_kernels.py
The workloads mirror a BER-run chunk: pulse-train rendering over ~8 ms of
4 MHz baseband and QAM error counting over a 256-symbol block.
"""

import time

import numpy as np

from specshape._kernels import _ref

try:
    from specshape._kernels import _fast
except ImportError:
    _fast = None


def bench(label, fn, *args, repeat=20):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    dt = (time.perf_counter() - t0) / repeat
    print(f"  {label:<28s} {dt * 1e3:9.3f} ms")
    return dt


def main():
    rng = np.random.default_rng(0)
    fs = 4e6
    n_samples = 256 * 256          # one 256-symbol chunk at N=128, 2x
    starts = np.sort(rng.uniform(-5e-5, n_samples / fs, 180))

    n_sym, n_act = 256, 62
    i_idx = rng.integers(0, 4, (n_sym, n_act), dtype=np.uint8)
    q_idx = rng.integers(0, 4, (n_sym, n_act), dtype=np.uint8)
    z = _ref.qam16_map(i_idx.ravel(), q_idx.ravel()).reshape(n_sym, n_act)
    z = z + 0.2 * (rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape))

    backends = [("numpy fallback", _ref)]
    if _fast is not None:
        backends.append(("cython extension", _fast))
    else:
        print("compiled extension not available; benchmarking fallback only")

    results = {}
    for name, mod in backends:
        print(f"{name}:")
        results[name] = {
            "gauss": bench("render_gauss_pairs", mod.render_gauss_pairs,
                           n_samples, fs, starts, 4.5e11, 12e-6),
            "rect": bench("render_rects", mod.render_rects,
                          n_samples, fs, starts, 5.28432e-6),
            "map": bench("qam16_map", mod.qam16_map,
                         i_idx.ravel(), q_idx.ravel()),
            "errors": bench("qam16_bit_errors_per_bin",
                            lambda zz, ii, qq: mod.qam16_bit_errors_per_bin(
                                zz, ii, qq, np.zeros(n_act, dtype=np.int64)),
                            z, i_idx, q_idx),
        }

    if len(results) == 2:
        ref, fast = results["numpy fallback"], results["cython extension"]
        print("speedup (numpy / cython):")
        for key in ref:
            print(f"  {key:<28s} {ref[key] / fast[key]:9.2f}x")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba-accelerated RNG kernels against the pure-numpy
reference path, plus the end-to-end transmit hot loop.

Run:  python3 benchmarks/bench_kernels.py
The active dispatch path follows GBSED_NO_NUMBA (unset = numba if present).
"""

import math
import time

import numpy as np

from gbsed import rng
from gbsed.channel import LinkConfig, transmit


def _bench(fn, *args, repeat=5, warmup=1):
    for _ in range(warmup):
        fn(*args)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    print(f"dispatch path: {'numba' if rng.USING_NUMBA else 'numpy'}")
    print(f"{'kernel':<22} {'n':>10} {'dispatch':>12} {'numpy ref':>12} {'speedup':>8}")
    pairs = [
        ("splitmix64_stream", rng.splitmix64_stream, rng.splitmix64_numpy),
        ("uniforms", rng.uniforms, rng.uniforms_numpy),
        ("normals", rng.normals, rng.normals_numpy),
    ]
    for n in (10_000, 1_000_000, 10_000_000):
        for name, fast, ref in pairs:
            t_fast = _bench(fast, 42, n)
            t_ref = _bench(ref, 42, n)
            print(f"{name:<22} {n:>10} {t_fast * 1e3:>10.2f}ms {t_ref * 1e3:>10.2f}ms "
                  f"{t_ref / t_fast:>7.2f}x")

    payload = bytes(np.arange(20_000, dtype=np.uint8) % 251)
    cfg = LinkConfig(snr_db=10.0, seed=7)
    t = _bench(transmit, payload, cfg, repeat=10)
    rate = 8 * len(payload) / t / 1e6
    print(f"\ntransmit 20 kB @ 10 dB: {t * 1e3:.2f} ms  ({rate:.1f} Mbit/s)")


if __name__ == "__main__":
    main()

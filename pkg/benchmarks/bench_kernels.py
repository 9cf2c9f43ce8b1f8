#!/usr/bin/env python3
"""Time the compiled kernels against the numpy reference twin.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from dictner.neural.kernels import HAVE_COMPILED, _reference

try:
    from dictner.neural.kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_lstm(impl, n, d, h, rng, repeats):
    x = rng.standard_normal((n, d))
    wx = rng.standard_normal((d, 4 * h)) * 0.1
    wh = rng.standard_normal((h, 4 * h)) * 0.1
    b = np.zeros(4 * h)
    hs, cs, gates = impl.lstm_forward(x, wx, wh, b)
    dh = rng.standard_normal((n, h))
    fwd = timeit(lambda: impl.lstm_forward(x, wx, wh, b), repeats)
    bwd = timeit(lambda: impl.lstm_backward(x, wx, wh, gates, hs, cs, dh), repeats)
    return fwd, bwd


def bench_crf(impl, n, k, rng, repeats):
    emis = rng.standard_normal((n, k))
    trans = rng.standard_normal((k + 2, k + 2))
    allow = np.ones((n, k), dtype=np.uint8)
    tallow = np.ones((k + 2, k + 2), dtype=np.uint8)
    log_z, alpha = impl.crf_forward(emis, trans, allow, tallow)
    fwd = timeit(lambda: impl.crf_forward(emis, trans, allow, tallow), repeats)
    grad = timeit(
        lambda: impl.crf_backward_grads(emis, trans, allow, tallow, alpha, log_z),
        repeats,
    )
    vit = timeit(lambda: impl.viterbi(emis, trans, tallow), repeats)
    return fwd, grad, vit


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()
    if _core is None:
        print("compiled backend unavailable; build it with "
              "`python setup.py build_ext --inplace` to compare")
    print(f"compiled backend selected by default: {HAVE_COMPILED}")
    rng = np.random.default_rng(0)

    rows = []
    for n, d, h in ((10, 50, 50), (30, 200, 100)):
        ref = bench_lstm(_reference, n, d, h, rng, args.repeats)
        com = bench_lstm(_core, n, d, h, rng, args.repeats) if _core else (None, None)
        rows.append((f"lstm fwd n={n} d={d} h={h}", ref[0], com[0]))
        rows.append((f"lstm bwd n={n} d={d} h={h}", ref[1], com[1]))
    for n, k in ((10, 9), (30, 21)):
        ref = bench_crf(_reference, n, k, rng, args.repeats)
        com = bench_crf(_core, n, k, rng, args.repeats) if _core else (None, None, None)
        rows.append((f"crf logZ n={n} k={k}", ref[0], com[0]))
        rows.append((f"crf grads n={n} k={k}", ref[1], com[1]))
        rows.append((f"viterbi n={n} k={k}", ref[2], com[2]))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel'.ljust(width)}  reference    compiled     speedup")
    for name, ref, com in rows:
        if com is None:
            print(f"{name.ljust(width)}  {ref * 1e6:9.1f}us          n/a")
        else:
            print(
                f"{name.ljust(width)}  {ref * 1e6:9.1f}us {com * 1e6:9.1f}us "
                f"{ref / com:9.1f}x"
            )


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernel paths.

Times each hot kernel and the two end-to-end descriptors on random images,
checks the two paths agree, and prints a table (or JSON with --json).

    python benchmarks/bench_kernels.py --size 512 --repeat 20
"""

import argparse
import json
import statistics
import sys
import time

import numpy as np

from vprbench import _kernels
from vprbench.cohog import cohog_describe
from vprbench.hog import hog_describe
from vprbench.imaging import GrayImage, _gradients_batch


def timeit(fn, repeat):
    fn()  # warm-up (triggers JIT compilation)
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def cases(size, rng):
    img = rng.integers(0, 256, (size, size)).astype(np.uint8)
    mag, ori = _gradients_batch(img[None])
    return img, mag, ori


def run(size, repeat, seed):
    if _kernels.numba_impl is None:
        sys.exit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(seed)
    img, mag, ori = cases(size, rng)
    gray = GrayImage(img)
    impls = {"numba": _kernels.numba_impl, "numpy": _kernels.numpy_impl}
    rows = []

    def add(name, make):
        times, outputs = {}, {}
        for label, impl in impls.items():
            fn = make(impl)
            times[label] = timeit(fn, repeat)
            outputs[label] = fn()
        a, b = outputs["numba"], outputs["numpy"]
        diff = float(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float)))) if np.size(a) else 0.0
        rows.append({"kernel": name, **{f"{k}_s": v for k, v in times.items()},
                     "speedup": times["numpy"] / times["numba"], "max_abs_diff": diff})

    hist = _kernels.numpy_impl.cell_histograms(mag, ori, 8, 9)
    add("cell_histograms", lambda impl: lambda: impl.cell_histograms(mag, ori, 8, 9))
    add("block_normalize", lambda impl: lambda: impl.block_normalize(hist, 2, 1, 1e-12))
    add("region_histograms", lambda impl: lambda: impl.region_histograms(img, 16))

    def with_backend(impl, fn):
        def call():
            saved = _kernels.active
            _kernels.active = impl
            try:
                return fn()
            finally:
                _kernels.active = saved
        return call

    add("hog_describe", lambda impl: with_backend(impl, lambda: hog_describe(gray).values))
    add("cohog_describe", lambda impl: with_backend(impl, lambda: cohog_describe(gray).matrix))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--repeat", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)
    rows = run(args.size, args.repeat, args.seed)
    if args.json:
        print(json.dumps({"size": args.size, "repeat": args.repeat, "results": rows}, indent=2))
        return
    print(f"{args.size}x{args.size}, median of {args.repeat} runs")
    print(f"{'kernel':<18} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8} {'max diff':>10}")
    for r in rows:
        print(f"{r['kernel']:<18} {r['numba_s'] * 1e3:>10.3f} {r['numpy_s'] * 1e3:>10.3f} "
              f"{r['speedup']:>8.2f} {r['max_abs_diff']:>10.2e}")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from sdcmetrics._kernels import _fallback

try:
    from sdcmetrics._kernels import _ckernels
except ImportError:
    _ckernels = None


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<14}{'n':>6}{'k':>5}{'python s':>12}{'cython s':>12}{'speedup':>9}")
    for n in (1080, 5000):
        pts = rng.standard_normal((n, 4))
        cases = [("average_ranks", None, lambda mod: mod.average_ranks(np.round(pts, 1)))]
        cases += [("mdav_labels", k, lambda mod, k=k: mod.mdav_labels(pts, k)) for k in (2, 10)]
        for name, k, call in cases:
            py = bench(lambda: call(_fallback), args.repeat)
            if _ckernels is None:
                print(f"{name:<14}{n:>6}{k or '-':>5}{py:>12.4f}{'-':>12}{'-':>9}")
                continue
            cy = bench(lambda: call(_ckernels), args.repeat)
            print(f"{name:<14}{n:>6}{k or '-':>5}{py:>12.4f}{cy:>12.4f}{py / cy:>8.1f}x")


if __name__ == "__main__":
    main()

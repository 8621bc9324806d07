"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-``repeat`` wall time for both backends and the
speed-up. The sdet row runs the full batched engine with ``det_batch``
swapped out underneath it.
"""
import argparse
import time

import numpy as np

from symdet import _pykernels, kernels
from symdet.algebra import matrix_algebra
from symdet.sdet import sdet_batch, sdet_plan

try:
    from symdet import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def sdet_with(impl, spec, L):
    saved = kernels.det_batch
    kernels.det_batch = impl.det_batch
    try:
        return sdet_batch(spec, L)
    finally:
        kernels.det_batch = saved


def cases(rng):
    stack = rng.standard_normal((20_000, 6, 6))
    A20 = rng.random((20, 20))
    A9 = rng.random((9, 9))
    spec = matrix_algebra(2)
    sdet_plan(spec, 5)
    L = rng.standard_normal((200, 4, 5, 5))
    return [
        ("det_batch 20000 x 6x6", lambda m: m.det_batch(stack)),
        ("permanent_ryser n=20", lambda m: m.permanent_ryser(A20)),
        ("permanent_naive n=9", lambda m: m.permanent_naive(A9)),
        ("sdet_batch Mat(2) 200 x n=5", lambda m: sdet_with(m, spec, L)),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled extension not available; build with `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<30} {'cython [s]':>11} {'python [s]':>11} {'speed-up':>9}")
    for name, run in cases(rng):
        c_out, p_out = run(_ckernels), run(_pykernels)
        if not np.allclose(c_out, p_out, rtol=1e-7):
            raise SystemExit(f"{name}: backends disagree")
        tc = best_of(lambda: run(_ckernels), args.repeat)
        tp = best_of(lambda: run(_pykernels), args.repeat)
        print(f"{name:<30} {tc:>11.4f} {tp:>11.4f} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()

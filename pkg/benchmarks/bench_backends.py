"""Time the convolution backends and the compiled core against its fallback.

Usage: python3 benchmarks/bench_backends.py [--size 256] [--repeat 3]
"""

import argparse
import time

import numpy as np

from reallife import _fallback
from reallife.conv import convolve
from reallife.grid import BinaryConfig
from reallife.kernel import KernelSpec, discretize_kernel, uniform_kernel

try:
    from reallife import _core
except ImportError:  # extension not built
    _core = None


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def backend_table(size, repeat, rng):
    print(f"backends on a random {size}x{size} config (seconds, best of {repeat})")
    print(f"{'kernel':<22}{'naive':>10}{'sat':>10}{'fft':>10}")
    cells = rng.integers(0, 2, (size, size)).astype(np.uint8)
    for n in (1, 5, 10, 25):
        k = uniform_kernel(2, n)
        a = BinaryConfig.from_array(cells, k.epsilon)
        row = [best(lambda b=b: convolve(a, k, b), repeat) for b in ("naive", "sat", "fft")]
        print(f"{k.label:<22}" + "".join(f"{t:>10.4f}" for t in row))
    for eps in (1 / 4, 1 / 8, 1 / 16):
        k = discretize_kernel(KernelSpec("ball-l2", 1.0), eps)
        a = BinaryConfig.from_array(cells, eps)
        row = [best(lambda b=b: convolve(a, k, b), repeat) for b in ("naive", "fft")]
        print(f"{'ball-l2 eps=' + format(eps, 'g'):<22}{row[0]:>10.4f}{'-':>10}{row[1]:>10.4f}")


def core_table(size, repeat, rng):
    if _core is None:
        print("compiled core not built; skipping compiled-vs-fallback comparison")
        return
    print(f"\ncompiled core vs numpy fallback (seconds, best of {repeat})")
    print(f"{'routine':<34}{'compiled':>10}{'fallback':>10}{'ratio':>8}{'same':>6}")
    for n in (2, 8):
        flat = rng.random((size + 2 * n) ** 2)
        side = size + 2 * n
        base = (np.arange(size)[:, None] * side + np.arange(size)[None, :] + n * side + n).ravel()
        base = base.astype(np.int64)
        dz = np.arange(-n, n + 1)
        offs = (dz[:, None] * side + dz[None, :]).ravel().astype(np.int64)
        w = np.full(len(offs), 1.0 / len(offs))
        tc = best(lambda: _core.gather_correlate(flat, base, offs, w), repeat)
        tf = best(lambda: _fallback.gather_correlate(flat, base, offs, w), repeat)
        same = np.array_equal(np.asarray(_core.gather_correlate(flat, base, offs, w)),
                              _fallback.gather_correlate(flat, base, offs, w))
        print(f"{'gather_correlate r=' + str(n):<34}{tc:>10.4f}{tf:>10.4f}{tf / tc:>8.1f}{str(same):>6}")
    for m in (500, 2000):
        X = rng.integers(-200, 200, (m, 2)).astype(np.int64)
        Y = rng.integers(-200, 200, (m, 2)).astype(np.int64)
        tc = best(lambda: _core.directed_hausdorff_sq(X, Y), repeat)
        tf = best(lambda: _fallback.directed_hausdorff_sq(X, Y), repeat)
        same = _core.directed_hausdorff_sq(X, Y) == _fallback.directed_hausdorff_sq(X, Y)
        print(f"{'directed_hausdorff_sq n=' + str(m):<34}{tc:>10.4f}{tf:>10.4f}{tf / tc:>8.1f}{str(same):>6}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    backend_table(args.size, args.repeat, rng)
    core_table(args.size, args.repeat, rng)


if __name__ == "__main__":
    main()

"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from spheretangents import _kernels_py
from spheretangents.plucker import Sphere, wedge2_matrix

try:
    from spheretangents import _kernels
except ImportError:  # extension not built
    _kernels = None


def random_lines(rng, n):
    a = rng.normal(size=(n, 3))
    b = a + rng.normal(size=(n, 3))
    A = np.column_stack((np.ones(n), a))
    B = np.column_stack((np.ones(n), b))
    pairs = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    P = np.column_stack([A[:, i] * B[:, j] - A[:, j] * B[:, i] for i, j in pairs])
    return P / np.linalg.norm(P, axis=1)[:, None]


def cases(n, rng):
    P = random_lines(rng, n)
    W = wedge2_matrix(Sphere([0.3, -0.2, 1.0], 1.5))
    pts = rng.normal(size=(n, 3)) * 5
    dirs = rng.normal(size=(n, 3))
    lo, hi = np.full(3, -4.0), np.full(3, 4.0)
    m = min(n, 400)
    prev = P[:m]
    cur = prev[rng.permutation(m)] + 1e-4
    return {
        "quadratic_forms": (P, W),
        "meet_forms": (P, P[0]),
        "clip_lines": (pts, dirs, lo, hi),
        "match_nearest": (prev, cur, 0.2),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = {"numpy": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    print(f"n={args.n} repeat={args.repeat} backends={','.join(backends)}")
    print(f"{'kernel':<16}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, inputs in cases(args.n, rng).items():
        times = {}
        for b, mod in backends.items():
            fn = getattr(mod, name)
            times[b] = min(timeit.repeat(lambda: fn(*inputs), number=1, repeat=args.repeat))
        speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<16}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
              + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()

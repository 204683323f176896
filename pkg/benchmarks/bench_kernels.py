"""Compare the compiled and numpy kernels on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from frolov import _pykernels
from frolov.matrix import frolov_matrix, scale

try:
    from frolov import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    """(label, callable taking a backend module)."""
    out = []
    for d, n in [(2, 2.0 ** 14), (3, 2.0 ** 10), (4, 2.0 ** 8)]:
        S = scale(frolov_matrix(d), n, np.full(d, 1.05))
        G = S.S_invT
        lo, hi, off = np.zeros(d), np.ones(d), S.S_invT @ np.full(d, 0.3)
        mlo, mhi = _pykernels.index_bounds(S.S.T, lo, hi, off)
        out.append((f"box_points d={d} n={int(n)}",
                    lambda k, a=(G, off, lo, hi, mlo, mhi): k.box_points(*a)))
    for d, R in [(2, 200), (3, 30), (4, 8)]:
        B = frolov_matrix(d).B
        out.append((f"min_abs_product d={d} R={R}", lambda k, B=B, R=R: k.min_abs_product(B, R)))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'workload':32s}" + "".join(f"{name:>14s}" for name, _ in backends) + "   speedup")
    for label, fn in workloads():
        times = []
        for _, mod in backends:
            fn(mod)   # warm up
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        speed = f"{times[0] / times[1]:9.1f}x" if len(times) == 2 else ""
        print(f"{label:32s}" + "".join(f"{t * 1e3:12.2f}ms" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()

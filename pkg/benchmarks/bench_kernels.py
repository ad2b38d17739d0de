"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best time of each backend and the speedup.
"""
import argparse
import timeit

import numpy as np

from holospt import kernels
from holospt import models as MD


def cases():
    cfg = MD.Sspt2dConfig(6, 6, False, False)
    stabs = cfg.stabilizer_list()
    n = cfg.n_qubits
    x = [s.x_bits for s in stabs]
    z = [s.z_bits for s in stabs]
    rows = [s.x_bits | (s.z_bits << n) for s in stabs]
    target = rows[0] ^ rows[5] ^ rows[17]
    A = np.diag([1, -1, 1, -1])
    return {
        f"symplectic_gram ({len(stabs)} strings, {n} qubits)":
            lambda impl: kernels.symplectic_gram(x, z, n, impl=impl),
        f"gf2_rank ({len(rows)} x {2 * n})": lambda impl: kernels.gf2_rank(rows, 2 * n, impl=impl),
        f"gf2_solve ({len(rows)} x {2 * n})": lambda impl: kernels.gf2_solve(rows, target, 2 * n, impl=impl),
        "null_box (4 fields, cutoff 4)": lambda impl: kernels.null_box(
            A, np.zeros((0, 4)), [[1, 0, 1, 0]], [2], 4, impl=impl),
        "null_box (4 fields, linear constraint, cutoff 3)": lambda impl: kernels.null_box(
            A, [[1, 1, 0, 0]], np.zeros((0, 4)), [], 3, impl=impl),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        cy = kernels.backend("cython")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1
    py = kernels.backend("python")
    print(f"{'kernel':<50} {'cython':>10} {'python':>10} {'speedup':>8}")
    for name, fn in cases().items():
        a, b = fn(cy), fn(py)
        same = (a is None and b is None) or np.array_equal(np.asarray(a), np.asarray(b))
        if not same:
            raise SystemExit(f"backends disagree on {name}")
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        print(f"{name:<50} {t_cy * 1e3:>8.2f}ms {t_py * 1e3:>8.2f}ms {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

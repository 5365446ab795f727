"""Compare the compiled and numpy term-sum backends on odd-dimensional kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  Both backends are timed on
the same term lists and radius grids, and their outputs are checked to agree.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from hypheat import _kernels
from hypheat.heatkernel import odd_expression


def bench(n: int, points: int, repeat: int) -> tuple[float, float | None, float]:
    expr = odd_expression(n)
    arrays = expr._arrays
    r = np.linspace(0.6, 8.0, points)
    t = 0.7

    def numpy_call():
        return _kernels.eval_terms_numpy(*arrays, r, t)

    t_numpy = min(timeit.repeat(numpy_call, number=1, repeat=repeat))
    if _kernels._eval_terms_compiled is None:
        return t_numpy, None, 0.0

    def compiled_call():
        return _kernels._eval_terms_compiled(*arrays, r, t)

    t_compiled = min(timeit.repeat(compiled_call, number=1, repeat=repeat))
    a, b = numpy_call(), compiled_call()
    diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
    return t_numpy, t_compiled, diff


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    print(f"backend in use: {_kernels.BACKEND}")
    print(f"{'n':>3} {'terms':>6} {'numpy [ms]':>11} {'compiled [ms]':>14} {'speed-up':>9} {'max rel diff':>13}")
    for n in (3, 5, 7, 9, 11, 13):
        t_np, t_c, diff = bench(n, args.points, args.repeat)
        terms = len(odd_expression(n)._arrays[0])
        if t_c is None:
            print(f"{n:3d} {terms:6d} {1e3 * t_np:11.3f} {'n/a':>14} {'n/a':>9} {'n/a':>13}")
        else:
            print(f"{n:3d} {terms:6d} {1e3 * t_np:11.3f} {1e3 * t_c:14.3f} {t_np / t_c:9.2f} {diff:13.2e}")


if __name__ == "__main__":
    main()

"""Benchmark: compiled vs pure-Python elimination kernel.

Both backends implement the identical fraction-free Gauss-Jordan algorithm
and must return identical results; this script times them against each
other on random dense rational matrices and on a real workload (the chart
cokernels of the (1, 1) configuration).

Run:  python3 benchmarks/bench_kernel.py
"""

import random
import time
from fractions import Fraction

from ncdef import _purekernel
from ncdef.linalg import DenseMatrix, rref

try:
    from ncdef import _corekernel
except ImportError:
    _corekernel = None


def random_matrix(rng, n, m, density=0.7):
    entries = [
        Fraction(rng.randint(-99, 99), rng.randint(1, 9))
        if rng.random() < density else Fraction(0)
        for _ in range(n * m)
    ]
    return DenseMatrix(n, m, entries)


def time_kernel(kernel, matrices, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for mat in matrices:
            rref(mat, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_random():
    rng = random.Random(42)
    for size in (20, 40, 80):
        matrices = [random_matrix(rng, size, size + 10) for _ in range(3)]
        t_pure = time_kernel(_purekernel, matrices)
        line = f"random {size}x{size + 10} x3   pure: {t_pure * 1000:8.1f} ms"
        if _corekernel is not None:
            t_core = time_kernel(_corekernel, matrices)
            line += f"   compiled: {t_core * 1000:8.1f} ms   speedup: {t_pure / t_core:4.2f}x"
            for mat in matrices:
                assert rref(mat, kernel=_purekernel) == rref(mat, kernel=_corekernel)
        print(line)


def bench_cokernels():
    from ncdef import elliptic
    from ncdef.cokernels import cokernel_of_derivation

    cfg = elliptic.build(1, 1)
    pref = cfg.ext_basis_strings()

    def run():
        for obj, chart in cfg.charts.items():
            cokernel_of_derivation(chart.algebra, chart.derivation, 6, 24, pref[obj])

    import ncdef.linalg as linalg

    results = {}
    kernels = {"pure": _purekernel}
    if _corekernel is not None:
        kernels["compiled"] = _corekernel
    for name, kernel in kernels.items():
        saved = linalg._DEFAULT_KERNEL
        linalg._DEFAULT_KERNEL = kernel
        try:
            t0 = time.perf_counter()
            run()
            results[name] = time.perf_counter() - t0
        finally:
            linalg._DEFAULT_KERNEL = saved
    line = f"chart cokernels (1,1)    pure: {results['pure'] * 1000:8.1f} ms"
    if "compiled" in results:
        line += (f"   compiled: {results['compiled'] * 1000:8.1f} ms"
                 f"   speedup: {results['pure'] / results['compiled']:4.2f}x")
    print(line)


if __name__ == "__main__":
    if _corekernel is None:
        print("compiled kernel not built; timing the pure backend only")
    bench_random()
    bench_cokernels()

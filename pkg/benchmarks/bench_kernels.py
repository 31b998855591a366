"""Benchmark the numba kernels against the pure-numpy fallback.

Run twice, once per backend:

    python benchmarks/bench_kernels.py
    PADHG_KERNEL=numpy python benchmarks/bench_kernels.py

The hot kernels are the truncated factorial products and unit power sums
driving the gamma/polygamma limits, and the finite-field cone counter.
"""

import time

import numpy as np

from padhg import kernels


def timeit(fn, *args, repeat=3):
    best = None
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return out, best


def main():
    print(f"backend: {kernels.backend_name()}")
    rows = []

    p, K = 7, 8
    mod = p ** K
    phi = p ** (K - 1) * (p - 1)
    n = mod - 12345

    out, dt = timeit(kernels.gamma_product, p, mod, n)
    rows.append(("gamma_product p=7 K=8", n, dt, out))

    out, dt = timeit(kernels.power_sum, p, mod, n, -1, phi)
    rows.append(("power_sum e=-1 p=7 K=8", n, dt, out))

    out, dt = timeit(kernels.power_sum, p, mod, n, -3, phi)
    rows.append(("power_sum e=-3 p=7 K=8", n, dt, out))

    tab, dt = timeit(kernels.gamma_table, p, mod, mod, repeat=1)
    rows.append(("gamma_table p=7 K=8", mod, dt, int(tab[-1])))

    tab, dt = timeit(kernels.power_table, p, mod, mod, -1, phi, repeat=1)
    rows.append(("power_table e=-1 p=7 K=8", mod, dt, int(tab[-1])))

    out, dt = timeit(kernels.legendre_sum, 1009, 5)
    rows.append(("legendre_sum p=1009", 1009, dt, out))

    # small finite-field cone count (F_49, 3 variables)
    from padhg.dwork import FqTables
    fq = FqTables(7, 2)
    powd = fq.power_table(3)
    poww = np.stack([fq.power_table(1)] * 3)
    wc = np.array([1, 1, 1], np.int64)
    out, dt = timeit(kernels.cone_count, fq.add, fq.mul, fq.neg,
                     powd, poww, wc, fq.mul[3 % 7, 3], 49, 3)
    rows.append(("cone_count F_49 n=2", 49 ** 3, dt, out))

    print(f"{'kernel':38s} {'size':>10s} {'best s':>10s}  result")
    for name, size, dt, out in rows:
        print(f"{name:38s} {size:>10d} {dt:>10.4f}  {out}")


if __name__ == "__main__":
    main()

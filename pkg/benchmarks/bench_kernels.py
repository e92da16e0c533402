"""Compare the compiled kernel backend against the numpy fallback.

Times the four hot kernels on representative grids and one full branch
solve.  Run from the repository root:

    python benchmarks/bench_kernels.py [--sizes 241,1001] [--repeats 2000]
"""

import argparse
import time

import numpy as np

import nehari._kernels as compiled
import nehari._kernels.pure as pure


def time_call(fn, args, repeats):
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def bench_kernels(n, repeats):
    rng = np.random.default_rng(0)
    u1 = np.zeros(n)
    u1[1:-1] = rng.standard_normal(n - 2)
    n2 = max(int(np.sqrt(n)) | 1, 33)
    u2 = np.zeros((n2, n2))
    u2[1:-1, 1:-1] = rng.standard_normal((n2 - 2, n2 - 2))
    w = rng.uniform(0.5, 1.5, n)
    dx = 0.05
    cases = [
        (f"grad_pow_cells_1d n={n} p=3", "grad_pow_cells_1d", (u1, dx, 3.0, 1e-10)),
        (f"dirichlet_energy_grad_1d n={n} p=3", "dirichlet_energy_grad_1d",
         (u1, dx, 3.0, 1e-10)),
        (f"dirichlet_energy_grad_2d n={n2}x{n2} p=3", "dirichlet_energy_grad_2d",
         (u2, dx, 3.0, 1e-10)),
        (f"power_sum_grad n={n} q=3", "power_sum_grad", (u1, w, 3.0)),
    ]
    rows = []
    for label, name, args in cases:
        t_pure = time_call(getattr(pure, name), args, repeats)
        t_comp = time_call(getattr(compiled, name), args, repeats)
        rows.append((label, t_pure * 1e6, t_comp * 1e6, t_pure / t_comp))
    return rows


def bench_solve():
    from nehari.branches import solve_nplus
    from nehari.eigensolve import lambda1
    from nehari.presets import template_1d

    data = template_1d(n=241)
    eig = lambda1(data, seed=0)
    lam = 5.0 * eig.lam1
    t0 = time.perf_counter()
    solve_nplus(lam, data, phi1=eig.phi1, seed=0)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="241,1001")
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    if compiled.backend() != "cython":
        print("compiled backend unavailable; timings compare pure against itself")

    print(f"{'kernel':50s} {'pure us':>10s} {'compiled us':>12s} {'speedup':>8s}")
    for n in (int(s) for s in args.sizes.split(",")):
        for label, t_pure, t_comp, speedup in bench_kernels(n, args.repeats):
            print(f"{label:50s} {t_pure:10.2f} {t_comp:12.2f} {speedup:7.1f}x")

    t_solve = bench_solve()
    print(f"\nfull branch solve (preset, active backend = {compiled.backend()}): "
          f"{t_solve:.2f} s")


if __name__ == "__main__":
    main()

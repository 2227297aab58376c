"""Compare the compiled eta-update kernels against the numpy fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from covreplan.lpsolve import _kernels_py

try:
    from covreplan.lpsolve import _kernels as compiled
except ImportError:
    compiled = None


def bench(mod, m: int, n_eta: int, reps: int, rng) -> float:
    # near-identity etas keep repeated application numerically tame
    eta_d = np.ascontiguousarray(0.01 * rng.standard_normal((n_eta, m)))
    eta_r = rng.integers(0, m, size=n_eta).astype(np.int64)
    eta_d[np.arange(n_eta), eta_r] = 1.0
    w = rng.standard_normal(m)
    t0 = time.perf_counter()
    for _ in range(reps):
        mod.ftran_etas(eta_d, eta_r, n_eta, w)
        mod.btran_etas(eta_d, eta_r, n_eta, w)
    return time.perf_counter() - t0


def main():
    rng = np.random.default_rng(0)
    print(f"{'m':>6} {'etas':>5} {'numpy (s)':>10} {'cython (s)':>11} "
          f"{'speedup':>8}")
    for m, n_eta, reps in ((200, 32, 2000), (1000, 64, 1000),
                           (5000, 64, 400)):
        t_py = bench(_kernels_py, m, n_eta, reps, rng)
        if compiled is None:
            print(f"{m:>6} {n_eta:>5} {t_py:>10.4f} {'(missing)':>11}")
            continue
        t_cy = bench(compiled, m, n_eta, reps, rng)
        print(f"{m:>6} {n_eta:>5} {t_py:>10.4f} {t_cy:>11.4f} "
              f"{t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()

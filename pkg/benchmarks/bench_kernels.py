"""Compare the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 200 500 1000] [--repeat 3]

Reports the best-of-``repeat`` wall time for each kernel and size, plus the
maximum deviation between the two backends.  LAPACK (numpy.linalg.eigvalsh)
is listed as a reference for the eigensolver.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fpconv import _kernels


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_eigen(sizes, repeat, rng):
    print(f"{'eigvals n':>12} {'numba s':>10} {'numpy s':>10} {'lapack s':>10} {'max |diff|':>12}")
    for n in sizes:
        a = rng.standard_normal((n, n))
        a = (a + a.T) / np.sqrt(2 * n)
        t_nb = best_time(lambda: _kernels.nb_sym_eigvals(a), repeat)
        t_np = best_time(lambda: _kernels.np_sym_eigvals(a), repeat)
        t_la = best_time(lambda: np.linalg.eigvalsh(a), repeat)
        diff = np.max(np.abs(np.sort(_kernels.nb_sym_eigvals(a)) - np.sort(_kernels.np_sym_eigvals(a))))
        print(f"{n:>12d} {t_nb:>10.4f} {t_np:>10.4f} {t_la:>10.4f} {diff:>12.2e}")


def bench_sums(sizes, repeat, rng):
    print(f"{'sums nodes':>12} {'kernel':>14} {'numba us':>10} {'numpy us':>10} {'rel diff':>10}")
    for m in sizes:
        x = np.sort(rng.uniform(-1.0, 1.0, m))
        w = np.full(m, 1.0 / m)
        z = -1.0 - 1e-3
        cases = {
            "resolvent": (lambda: _kernels.nb_resolvent_sum(x, w, z, 2), lambda: _kernels.np_resolvent_sum(x, w, z, 2)),
            "variance": (lambda: _kernels.nb_resolvent_var(x, w, z), lambda: _kernels.np_resolvent_var(x, w, z)),
            "log_sum": (lambda: _kernels.nb_log_sum(x, w, -1.0, 1e-3), lambda: _kernels.np_log_sum(x, w, -1.0, 1e-3)),
        }
        for name, (f_nb, f_np) in cases.items():
            t_nb = best_time(f_nb, repeat * 20) * 1e6
            t_np = best_time(f_np, repeat * 20) * 1e6
            rel = abs(f_nb() - f_np()) / abs(f_np())
            print(f"{m:>12d} {name:>14} {t_nb:>10.1f} {t_np:>10.1f} {rel:>10.1e}")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000])
    ap.add_argument("--nodes", type=int, nargs="+", default=[300, 3000, 30000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    _kernels.nb_sym_eigvals(np.eye(4) + 0.1)
    _kernels.nb_resolvent_sum(np.ones(2), np.ones(2), 0.0, 1)
    _kernels.nb_resolvent_var(np.ones(2), np.ones(2), 0.0)
    _kernels.nb_log_sum(np.ones(2), np.ones(2), 0.0, 1.0)
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f}s")
    bench_eigen(args.sizes, args.repeat, rng)
    bench_sums(args.nodes, args.repeat, rng)


if __name__ == "__main__":
    main()

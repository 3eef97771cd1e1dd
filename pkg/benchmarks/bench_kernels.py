"""Compare the numba and numpy kernels on the bundled models.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 3]

Both kernels are called directly, so the RATLAWS_DISABLE_NUMBA flag does
not matter here.  The first numba call (compilation or cache load) is
excluded from the timings.
"""
import argparse
import time

import numpy as np

from ratlaws import _kernels, corpus
from ratlaws.distribution import sampling_tables


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--words", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--models", default="binomial,fig1,markov3")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'model':<10} {'kernel':<12} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}  rel. diff")
    for name in args.models.split(","):
        model = corpus.load(name)
        a, b, xi, eta = model.a_matrix, model.b_matrix, model.xi, model.eta
        start, table = sampling_tables(model, 200)
        u = rng.random((args.words, 201))
        cases = {
            "coefficients": (_kernels.coefficients_numpy, _kernels.coefficients_jit, (a, b, xi, eta, args.n)),
            "moments": (_kernels.moments_numpy, _kernels.moments_jit, (a, b, xi, eta, 50 * args.n)),
            "walk_counts": (_kernels.walk_counts_numpy, _kernels.walk_counts_jit, (start, table, u)),
        }
        for kname, (f_np, f_jit, fargs) in cases.items():
            f_jit(*fargs)  # warm up
            t_np, r_np = best_of(lambda: f_np(*fargs), args.repeat)
            t_jit, r_jit = best_of(lambda: f_jit(*fargs), args.repeat)
            r_np, r_jit = np.asarray(r_np, dtype=float), np.asarray(r_jit, dtype=float)
            diff = float(np.max(np.abs(r_np - r_jit)) / max(np.max(np.abs(r_np)), 1e-300))
            print(f"{name:<10} {kname:<12} {t_np:10.4f} {t_jit:10.4f} {t_np / t_jit:8.1f}  {diff:.2e}")


if __name__ == "__main__":
    main()

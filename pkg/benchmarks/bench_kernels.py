"""Backend benchmark: numba kernels vs the pure-numpy fallback.

Times the two interchangeable implementations of the jet-coefficient
convolution on

  1. the raw multiplication kernel itself, and
  2. the full curvature pipeline (order-4 jet of F^2 -> spray -> Riemann
     operator) on catalog metrics,

and prints per-backend timings with the speedup.  Run as

    python benchmarks/bench_kernels.py [reps]

Backend selection elsewhere in the package follows FINSLER_LAB_BACKEND;
here both backends are exercised explicitly via set_backend().
"""

import sys
import time

import numpy as np

from finslerlab import _kernels, geometry, jets, zoo


def time_call(fn, reps):
    fn()  # warmup (JIT compile, table build)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def bench_raw_multiply(reps):
    print("raw jet multiply (coefficient convolution)")
    print("-" * 60)
    rng = np.random.default_rng(7)
    for n_vars, order in ((4, 4), (6, 4)):
        ctx = jets.get_context(n_vars, order)
        a = rng.standard_normal(ctx.n_terms)
        b = rng.standard_normal(ctx.n_terms)

        def call():
            _kernels.multiply(a, b, ctx.mul_i, ctx.mul_j, ctx.mul_k, ctx.n_terms)

        row = {}
        for backend in backends():
            prev = _kernels.set_backend(backend)
            try:
                row[backend] = time_call(call, reps * 20)
            finally:
                _kernels.set_backend(prev)
        report(f"{n_vars} vars, order {order}, {ctx.n_terms} terms, "
               f"{ctx.mul_i.size} products", row)
    print()


def bench_curvature_pipeline(reps):
    print("curvature pipeline (jet of F^2 -> spray -> Riemann operator)")
    print("-" * 60)
    rng = np.random.default_rng(11)
    for metric in (zoo.funk_ball(1), zoo.klein(3)):
        xs = 0.2 * rng.standard_normal((reps + 1, metric.n))
        ys = rng.standard_normal((reps + 1, metric.n))
        idx = {"k": 0}

        def call():
            # fresh state each rep so nothing can be memoized away
            k = idx["k"] % (reps + 1)
            idx["k"] += 1
            geometry.riemann_curvature(metric, xs[k], ys[k])

        row = {}
        for backend in backends():
            prev = _kernels.set_backend(backend)
            try:
                row[backend] = time_call(call, reps)
            finally:
                _kernels.set_backend(prev)
        report(f"{metric.name} (n = {metric.n})", row)
    print()


def backends():
    names = ["numpy"]
    if _kernels.HAVE_NUMBA:
        names.append("numba")
    return names


def report(label, row):
    line = f"  {label:<46s}"
    for backend in backends():
        line += f"  {backend} {row[backend] * 1e6:10.1f} us"
    if "numba" in row:
        line += f"  speedup {row['numpy'] / row['numba']:5.2f}x"
    print(line)


def main():
    reps = int(sys.argv[1]) if len(sys.argv) > 1 else 30
    print(f"active backend at import: {_kernels.active_backend()}"
          f" (numba available: {_kernels.HAVE_NUMBA})")
    print(f"reps per measurement: {reps}\n")
    bench_raw_multiply(reps)
    bench_curvature_pipeline(reps)


if __name__ == "__main__":
    main()

"""Compare the JIT-compiled kernels against the pure-numpy fallback.

Run `python benchmarks/bench_kernels.py`; set GAUSSGAUGE_NO_NUMBA=1 to force
the fallback for the whole package (this script times both paths in one
process by reaching for the undecorated functions).
"""

import time

import numpy as np

from gaussgauge import _kernels


def plain(fn):
    return getattr(fn, "py_func", fn)


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_stein_batch(n=200_000):
    rng = np.random.default_rng(0)
    xs = np.empty((n, 4))
    ys = np.empty((n, 3))
    for i in range(n):
        g = rng.standard_normal((2, 2))
        spr = np.abs(np.linalg.eigvals(g)).max()
        g *= rng.uniform(0.1, 0.9) / max(spr, 1e-12)
        xs[i] = g.reshape(-1)
        h = rng.standard_normal((2, 2))
        y = h @ h.T
        ys[i] = (y[0, 0], y[0, 1], y[1, 1])
    out = np.empty((n, 3))
    if _kernels.JIT_ENABLED:
        _kernels.stein2_batch(xs[:10], ys[:10], out[:10])  # compile
        jit_time = timeit(_kernels.stein2_batch, xs, ys, out)
    else:
        jit_time = None

    def python_loop(xs, ys, out):
        fn = plain(_kernels.stein2_closed)
        for i in range(xs.shape[0]):
            s11, s12, s22, _ = fn(xs[i, 0], xs[i, 1], xs[i, 2], xs[i, 3],
                                  ys[i, 0], ys[i, 1], ys[i, 2])
            out[i, 0], out[i, 1], out[i, 2] = s11, s12, s22

    py_time = timeit(python_loop, xs[: n // 10], ys[: n // 10], out[: n // 10]) * 10
    return n, jit_time, py_time


def bench_rk4(steps=200_000):
    rng = np.random.default_rng(1)
    a = -np.eye(6) + 0.2 * rng.standard_normal((6, 6))
    d = np.eye(6)
    u = rng.standard_normal(6)
    d0 = rng.standard_normal(6)
    v0 = np.eye(6)
    if _kernels.JIT_ENABLED:
        _kernels.rk4_moments(a, d, u, d0, v0, 1.0, 10)  # compile
        jit_time = timeit(_kernels.rk4_moments, a, d, u, d0, v0, 1.0, steps)
    else:
        jit_time = None
    py_time = timeit(plain(_kernels.rk4_moments), a, d, u, d0, v0, 1.0, steps // 100) * 100
    return steps, jit_time, py_time


def main():
    print(f"numba JIT enabled: {_kernels.JIT_ENABLED}")
    n, jit, py = bench_stein_batch()
    line = f"stein closed form x{n}: python {py:.3f}s"
    if jit is not None:
        line += f", jit {jit:.3f}s, speedup {py / jit:.1f}x"
    print(line)
    steps, jit, py = bench_rk4()
    line = f"rk4 moments {steps} steps (3 modes): python {py:.3f}s (extrapolated)"
    if jit is not None:
        line += f", jit {jit:.3f}s, speedup {py / jit:.1f}x"
    print(line)


if __name__ == "__main__":
    main()

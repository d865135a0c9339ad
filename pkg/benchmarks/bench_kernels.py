"""Benchmark the compiled recursion kernels against the numpy fallback.

Runs each kernel on identical inputs through both backends, checks the
results agree to 1e-12 relative, and prints a timing table.

    python benchmarks/bench_kernels.py [--paths N] [--cells L]
"""

import argparse
import time

import numpy as np

from levymlmc import coeffs
from levymlmc._kernels import _core, _ref


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _agree(a, b, label):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.max(np.abs(a)), 1e-300)
    worst = np.max(np.abs(a - b)) / scale
    status = "ok" if worst < 1e-12 else "MISMATCH"
    print(f"    agreement {label}: {worst:.3e} ({status})")
    if worst >= 1e-12:
        raise SystemExit(f"backend mismatch in {label}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--paths", type=int, default=2000)
    parser.add_argument("--cells", type=int, default=1024)
    parser.add_argument("--m", type=int, default=2)
    args = parser.parse_args()

    if _core is None:
        raise SystemExit("compiled backend not built; run pip install -e . first")

    rng = np.random.default_rng(42)
    dy = 0.01 * rng.standard_normal((args.paths, args.cells))
    coeff = coeffs.smooth_bump(0.5, 2.0, 1.0)
    kind, (p0, p1, p2) = coeff.kind, coeff.params
    x0 = 0.1

    print(f"paths={args.paths} cells={args.cells} m={args.m}")

    t_c, out_c = _time(lambda: _core.euler_path_batch(kind, p0, p1, p2, x0, dy))
    t_py, out_py = _time(lambda: _ref.euler_path_batch(coeff, x0, dy))
    print(f"euler_path_batch      c={t_c:8.4f}s  python={t_py:8.4f}s  speedup={t_py / t_c:6.1f}x")
    _agree(out_c, out_py, "euler_path")

    t_c, out_c = _time(lambda: _core.coupled_terminal_batch(kind, p0, p1, p2, x0, dy, args.m))
    t_py, out_py = _time(lambda: _ref.coupled_terminal_batch(coeff, x0, dy, args.m))
    print(f"coupled_terminal      c={t_c:8.4f}s  python={t_py:8.4f}s  speedup={t_py / t_c:6.1f}x")
    _agree(out_c[2], out_py[2], "coupled_terminal u")

    t_c, out_c = _time(lambda: _core.coupled_nodes_batch(kind, p0, p1, p2, x0, dy, args.m))
    t_py, out_py = _time(lambda: _ref.coupled_nodes_batch(coeff, x0, dy, args.m))
    print(f"coupled_nodes         c={t_c:8.4f}s  python={t_py:8.4f}s  speedup={t_py / t_c:6.1f}x")
    _agree(out_c[2], out_py[2], "coupled_nodes u")

    a = 0.01 * rng.standard_normal((args.paths, args.cells))
    b = 0.001 * rng.standard_normal((args.paths, args.cells))
    t_c, out_c = _time(lambda: _core.linear_error_recursion(a, b))
    t_py, out_py = _time(lambda: _ref.linear_error_recursion(a, b))
    print(f"linear_error_rec      c={t_c:8.4f}s  python={t_py:8.4f}s  speedup={t_py / t_c:6.1f}x")
    _agree(out_c, out_py, "linear_error_recursion")


if __name__ == "__main__":
    main()

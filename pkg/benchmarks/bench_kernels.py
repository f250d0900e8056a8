"""Timing comparison of the numba and numpy paths for the hot kernels.

The two kernels that run every stage of every time step outside the FFTs
are the flux-divergence assembly and the per-node eigenvalue range.  Both
have an @njit implementation and a vectorized numpy implementation; this
script times them on the same inputs and checks they agree.

Run:  python3 benchmarks/bench_kernels.py [--n 48] [--repeats 7]
"""
import argparse
import time

import numpy as np

from landau import _accel, compute_coefficients, make_grid
from landau.diagnostics import maxwellian
from landau.grid_field import gradient_values


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=48)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    grid = make_grid(args.n, 8.0)
    f = maxwellian(grid)
    coeffs = compute_coefficients(f)
    g3 = gradient_values(grid, f.values)
    a6 = coeffs.A.values
    ga3 = coeffs.grad_a.values
    h = grid.h

    print(f"grid n={args.n} ({args.n ** 3} cells), repeats={args.repeats}")
    print(f"numba available: {_accel.HAS_NUMBA}, selected: {_accel.USE_NUMBA}")
    print()

    rows = []

    t_np = median_time(lambda: _accel.div_flux_numpy(f.values, g3, a6, ga3, h), args.repeats)
    rows.append(("div_flux numpy", t_np, ""))
    if _accel.HAS_NUMBA:
        _accel.div_flux_numba(f.values, g3, a6, ga3, h)  # compile outside the clock
        t_nb = median_time(lambda: _accel.div_flux_numba(f.values, g3, a6, ga3, h), args.repeats)
        ref = _accel.div_flux_numpy(f.values, g3, a6, ga3, h)
        got = _accel.div_flux_numba(f.values, g3, a6, ga3, h)
        diff = float(np.abs(ref - got).max())
        rows.append(("div_flux numba", t_nb, f"speedup {t_np / t_nb:.2f}x, max diff {diff:.2e}"))

    t_np = median_time(lambda: _accel.eig_range_numpy(a6), args.repeats)
    rows.append(("eig_range numpy", t_np, ""))
    if _accel.HAS_NUMBA:
        _accel.eig_range_numba(a6)
        t_nb = median_time(lambda: _accel.eig_range_numba(a6), args.repeats)
        lo_np, hi_np = _accel.eig_range_numpy(a6)
        lo_nb, hi_nb = _accel.eig_range_numba(a6)
        diff = max(float(np.abs(lo_np - lo_nb).max()), float(np.abs(hi_np - hi_nb).max()))
        rows.append(("eig_range numba", t_nb, f"speedup {t_np / t_nb:.2f}x, max diff {diff:.2e}"))

    width = max(len(name) for name, _, _ in rows)
    for name, t, note in rows:
        print(f"{name:<{width}}  {t * 1e3:9.3f} ms  {note}")

    if not _accel.HAS_NUMBA:
        print()
        print("numba not installed; only the numpy path was timed")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--n 241] [--repeat 5] [--json out.json]

Each numba kernel is called once before timing so compilation is excluded.
"""
import argparse
import itertools
import json
import time

import numpy as np

from nonlocal_relax import kernels
from nonlocal_relax.envelopes import _hull_envelope, distance_integrand
from nonlocal_relax.grid import ScalarGrid
from nonlocal_relax.rules import well_set


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(n):
    g = ScalarGrid(-3.0, 3.0, n)
    W = distance_integrand(g, well_set([(1, 0), (-1, 0), (0, 1), (0, -1), (2, 2)]), 2.0, 1).values
    x = g.points
    s = np.linspace(-10, 10, 2 * (n - 1) + 1)
    rng = np.random.default_rng(0)
    mask = np.ascontiguousarray(rng.random((n, n)) < 0.002)
    mask |= mask.T
    m = 61
    M = np.ascontiguousarray(W[::max(1, n // m), ::max(1, n // m)][:m, :m])
    T = np.array(list(itertools.combinations_with_replacement(range(m), 3)), dtype=np.int64)
    w = np.full(3, 1 / 3)
    # triangles from the hull of the lifted cloud, reused by both rasterisers
    tri_holder = {}

    def capture(tri, nn, vals):
        tri_holder["args"] = (tri, nn, vals)
        return kernels.raster_triangles_numpy(tri, nn, vals)

    orig = kernels.raster_triangles
    kernels.raster_triangles = capture
    try:
        _hull_envelope(W)
    finally:
        kernels.raster_triangles = orig
    return {
        "lower_envelope_rows": ((np.ascontiguousarray(W), x), kernels.lower_envelope_rows_numba,
                                kernels.lower_envelope_rows_numpy),
        "sc_fill": ((mask,), kernels.sc_fill_numba, kernels.sc_fill_numpy),
        "conjugate_rows": ((np.ascontiguousarray(W), x, s), kernels.conjugate_rows_numba,
                           kernels.conjugate_rows_numpy),
        "raster_triangles": (tri_holder["args"], kernels.raster_triangles_numba,
                             kernels.raster_triangles_numpy),
        "pair_energies": ((M, T, w), kernels.pair_energies_numba, kernels.pair_energies_numpy),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=241)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    rows = []
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}  match")
    for name, (inputs, fast, slow) in cases(args.n).items():
        a = fast(*inputs)
        b = slow(*inputs)
        same = bool(np.allclose(a, b, atol=1e-10, equal_nan=True))
        t_fast = best_of(lambda: fast(*inputs), args.repeat)
        t_slow = best_of(lambda: slow(*inputs), max(1, args.repeat // 2))
        rows.append({"kernel": name, "numba_s": t_fast, "numpy_s": t_slow, "match": same})
        print(f"{name:<22}{1e3 * t_fast:>12.2f}{1e3 * t_slow:>12.2f}{t_slow / t_fast:>10.1f}  {same}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"n": args.n, "results": rows}, fh, indent=2)


if __name__ == "__main__":
    main()

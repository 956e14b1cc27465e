"""Compiled kernels against their numpy twins and brute-force oracles."""
import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nonlocal_relax import kernels


def brute_lower_envelope(f, x):
    """Largest convex minorant at the nodes: min over chords through each node."""
    n = len(f)
    out = f.astype(float).copy()
    for i in range(n):
        for a in range(i + 1):
            for b in range(i, n):
                if a == b:
                    continue
                t = (x[i] - x[a]) / (x[b] - x[a])
                out[i] = min(out[i], (1 - t) * f[a] + t * f[b])
    return out


def naive_sc_fill(mask):
    m = mask.copy()
    while True:
        old = m.copy()
        for M in (m, m.T):
            for r in range(M.shape[0]):
                idx = np.nonzero(M[r])[0]
                if len(idx):
                    M[r, idx[0]:idx[-1] + 1] = True
        if np.array_equal(old, m):
            return m


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (3, 12), elements=st.floats(-5, 5)))
def test_lower_envelope_matches_oracle(F):
    x = np.linspace(-1, 2, 12)
    ref = np.array([brute_lower_envelope(r, x) for r in F])
    for fn in (kernels.lower_envelope_rows_numba, kernels.lower_envelope_rows_numpy):
        out = fn(np.ascontiguousarray(F), x)
        assert np.allclose(out, ref, atol=1e-12)
        assert np.all(out <= F)


@settings(max_examples=60, deadline=None)
@given(arrays(np.bool_, (9, 9), elements=st.booleans()))
def test_sc_fill_matches_naive(mask):
    ref = naive_sc_fill(mask)
    assert np.array_equal(kernels.sc_fill_numba(mask), ref)
    assert np.array_equal(kernels.sc_fill_numpy(mask), ref)


def test_conjugate_rows_twins():
    rng = np.random.default_rng(3)
    F = rng.random((7, 15))
    x = np.linspace(-1, 1, 15)
    s = np.linspace(-3, 3, 29)
    ref = np.max(s[None, :, None] * x[None, None, :] - F[:, None, :], axis=2)
    assert np.allclose(kernels.conjugate_rows_numba(F, x, s), ref)
    assert np.allclose(kernels.conjugate_rows_numpy(F, x, s), ref)


def test_raster_triangles_twins():
    n = 6
    vals = np.arange(n * n, dtype=float)
    # split the square into two triangles on flat node indices
    tri = np.array([[0, n - 1, n * n - 1], [0, n * n - 1, n * (n - 1)]], dtype=np.int64)
    a = kernels.raster_triangles_numba(tri, n, vals)
    b = kernels.raster_triangles_numpy(tri, n, vals)
    assert np.array_equal(a, b)
    # the interpolant of an affine function is itself
    assert np.allclose(a.ravel(), vals)


def test_pair_energies_twins():
    rng = np.random.default_rng(4)
    M = rng.random((10, 10))
    T = np.array(list(itertools.combinations_with_replacement(range(10), 3)), dtype=np.int64)
    w = np.array([0.2, 0.3, 0.5])
    ref = np.array([sum(w[i] * w[j] * M[t[i], t[j]] for i in range(3) for j in range(3)) for t in T])
    assert np.allclose(kernels.pair_energies_numba(M, T, w), ref, atol=1e-14)
    assert np.allclose(kernels.pair_energies_numpy(M, T, w), ref, atol=1e-14)


def test_backend_flag():
    assert kernels.BACKEND in ("numba", "numpy")


def test_numpy_backend_selected_by_env():
    import subprocess
    import sys
    code = "from nonlocal_relax import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={**__import__("os").environ,
                         "NONLOCAL_RELAX_NUMBA": "0"}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"

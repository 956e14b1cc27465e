"""Hot numeric loops, each in a numba flavour and a pure-numpy flavour.

The public names at the bottom of the module are bound to one flavour at
import time (see ``_accel``). Both flavours stay importable under their
``*_numba`` / ``*_numpy`` names so tests and the benchmark can compare them.
"""
import numpy as np

from ._accel import USE_NUMBA, njit, prange


# --------------------------------------------------------------------------
# 1D lower convex envelope of every row (monotone chain + linear fill)
# --------------------------------------------------------------------------

@njit(parallel=True)
def lower_envelope_rows_numba(F, x):
    R, n = F.shape
    out = np.empty_like(F)
    for r in prange(R):
        hull = np.empty(n, np.int64)
        k = 0
        for j in range(n):
            while k >= 2:
                a = hull[k - 2]
                b = hull[k - 1]
                cross = (x[b] - x[a]) * (F[r, j] - F[r, a]) - (F[r, b] - F[r, a]) * (x[j] - x[a])
                if cross <= 0.0:
                    k -= 1
                else:
                    break
            hull[k] = j
            k += 1
        for s in range(k - 1):
            a = hull[s]
            b = hull[s + 1]
            out[r, a] = F[r, a]
            span = x[b] - x[a]
            for j in range(a + 1, b):
                t = (x[j] - x[a]) / span
                v = (1.0 - t) * F[r, a] + t * F[r, b]
                out[r, j] = v if v < F[r, j] else F[r, j]
        out[r, hull[k - 1]] = F[r, hull[k - 1]]
    return out


def _lower_hull_indices(x, f):
    hull = []
    for j in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (f[j] - f[a]) - (f[b] - f[a]) * (x[j] - x[a])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(j)
    return hull


def lower_envelope_rows_numpy(F, x):
    F = np.asarray(F, dtype=float)
    out = np.empty_like(F)
    xs = x.tolist()
    for r in range(F.shape[0]):
        row = F[r]
        h = _lower_hull_indices(xs, row.tolist())
        out[r] = np.minimum(np.interp(x, x[h], row[h]), row)
    return out


# --------------------------------------------------------------------------
# separately convex hull of a boolean mask: fill row and column runs
# --------------------------------------------------------------------------

@njit
def sc_fill_numba(mask):
    n0, n1 = mask.shape
    m = mask.copy()
    changed = True
    while changed:
        changed = False
        for i in range(n0):
            lo = -1
            hi = -1
            for j in range(n1):
                if m[i, j]:
                    if lo < 0:
                        lo = j
                    hi = j
            for j in range(lo + 1, hi):
                if not m[i, j]:
                    m[i, j] = True
                    changed = True
        for j in range(n1):
            lo = -1
            hi = -1
            for i in range(n0):
                if m[i, j]:
                    if lo < 0:
                        lo = i
                    hi = i
            for i in range(lo + 1, hi):
                if not m[i, j]:
                    m[i, j] = True
                    changed = True
    return m


def _fill_rows(m):
    n = m.shape[1]
    has = m.any(axis=1)
    first = m.argmax(axis=1)
    last = n - 1 - m[:, ::-1].argmax(axis=1)
    idx = np.arange(n)
    return (idx >= first[:, None]) & (idx <= last[:, None]) & has[:, None]


def sc_fill_numpy(mask):
    m = np.asarray(mask, dtype=bool)
    while True:
        new = _fill_rows(m)
        new = _fill_rows(new.T).T
        if np.array_equal(new, m):
            return new
        m = new


# --------------------------------------------------------------------------
# discrete Legendre-Fenchel transform along rows
#   out[r, k] = max_j  s[k] * x[j] - F[r, j]
# --------------------------------------------------------------------------

@njit(parallel=True)
def conjugate_rows_numba(F, x, s):
    R, n = F.shape
    S = s.shape[0]
    out = np.empty((R, S))
    for r in prange(R):
        for k in range(S):
            best = -np.inf
            sk = s[k]
            for j in range(n):
                v = sk * x[j] - F[r, j]
                if v > best:
                    best = v
            out[r, k] = best
    return out


def conjugate_rows_numpy(F, x, s):
    F = np.asarray(F, dtype=float)
    out = np.empty((F.shape[0], s.shape[0]))
    sx = np.multiply.outer(s, x)
    for r in range(F.shape[0]):
        out[r] = (sx - F[r]).max(axis=1)
    return out


# --------------------------------------------------------------------------
# rasterise lower-hull triangles onto the index grid, keeping the max
# --------------------------------------------------------------------------

@njit
def raster_triangles_numba(tri, n, vals):
    env = np.full((n, n), -np.inf)
    for t in range(tri.shape[0]):
        a = tri[t, 0]
        b = tri[t, 1]
        c = tri[t, 2]
        ai, aj = a // n, a % n
        bi, bj = b // n, b % n
        ci, cj = c // n, c % n
        d = (bi - ai) * (cj - aj) - (bj - aj) * (ci - ai)
        if d == 0:
            continue
        i0 = min(ai, bi, ci)
        i1 = max(ai, bi, ci)
        j0 = min(aj, bj, cj)
        j1 = max(aj, bj, cj)
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                wa = (bi - i) * (cj - j) - (bj - j) * (ci - i)
                wb = (ci - i) * (aj - j) - (cj - j) * (ai - i)
                wc = (ai - i) * (bj - j) - (aj - j) * (bi - i)
                if d > 0:
                    if wa < 0 or wb < 0 or wc < 0:
                        continue
                else:
                    if wa > 0 or wb > 0 or wc > 0:
                        continue
                v = (wa * vals[a] + wb * vals[b] + wc * vals[c]) / d
                if v > env[i, j]:
                    env[i, j] = v
    return env


def raster_triangles_numpy(tri, n, vals):
    env = np.full((n, n), -np.inf)
    ii, jj = np.divmod(np.asarray(tri, dtype=np.int64), n)
    for t in range(tri.shape[0]):
        ai, bi, ci = ii[t]
        aj, bj, cj = jj[t]
        d = (bi - ai) * (cj - aj) - (bj - aj) * (ci - ai)
        if d == 0:
            continue
        I, J = np.mgrid[min(ai, bi, ci):max(ai, bi, ci) + 1, min(aj, bj, cj):max(aj, bj, cj) + 1]
        wa = (bi - I) * (cj - J) - (bj - J) * (ci - I)
        wb = (ci - I) * (aj - J) - (cj - J) * (ai - I)
        wc = (ai - I) * (bj - J) - (aj - J) * (bi - I)
        if d > 0:
            inside = (wa >= 0) & (wb >= 0) & (wc >= 0)
        else:
            inside = (wa <= 0) & (wb <= 0) & (wc <= 0)
        a, b, c = tri[t]
        v = (wa * vals[a] + wb * vals[b] + wc * vals[c]) / d
        I, J, v = I[inside], J[inside], v[inside]
        np.maximum.at(env, (I, J), v)
    return env


# --------------------------------------------------------------------------
# weighted pair energies of many candidate index tuples
#   E[c] = sum_ij w[i] w[j] M[T[c, i], T[c, j]]
# --------------------------------------------------------------------------

@njit(parallel=True)
def pair_energies_numba(M, T, w):
    C, N = T.shape
    out = np.empty(C)
    for c in prange(C):
        acc = 0.0
        for i in range(N):
            ti = T[c, i]
            row = 0.0
            for j in range(N):
                row += w[j] * M[ti, T[c, j]]
            acc += w[i] * row
        out[c] = acc
    return out


def pair_energies_numpy(M, T, w, block=100_000):
    T = np.asarray(T, dtype=np.int64)
    ww = np.multiply.outer(w, w)
    out = np.empty(T.shape[0])
    for s in range(0, T.shape[0], block):
        t = T[s:s + block]
        out[s:s + block] = (M[t[:, :, None], t[:, None, :]] * ww).sum(axis=(1, 2))
    return out


if USE_NUMBA:
    lower_envelope_rows = lower_envelope_rows_numba
    sc_fill = sc_fill_numba
    conjugate_rows = conjugate_rows_numba
    raster_triangles = raster_triangles_numba
    pair_energies = pair_energies_numba
else:
    lower_envelope_rows = lower_envelope_rows_numpy
    sc_fill = sc_fill_numpy
    conjugate_rows = conjugate_rows_numpy
    raster_triangles = raster_triangles_numpy
    pair_energies = pair_energies_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"

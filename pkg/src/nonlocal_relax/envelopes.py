"""Convex, separately convex and separately level convex envelopes on the grid."""
from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import kernels
from .grid import GridFunction, GridSet, ScalarGrid, sample_function
from .rules import DistanceRule, PlanarSet, norm2, parse_norm
from .sets import separately_convex_hull_set


def distance_integrand(grid: ScalarGrid, K, p: float = 2.0, q=1.0) -> GridFunction:
    """Sample dist_q((xi, zeta), K)^p.

    ``K`` is either an exact ``PlanarSet`` (closed-form distances) or a
    ``GridSet`` (distance to the marked nodes).
    """
    if isinstance(K, PlanarSet):
        W = sample_function(grid, DistanceRule(K, p, q))
        if K.is_symmetric and not W.symmetric:
            # segment distances round differently under transposition
            v = np.minimum(W.values, W.values.T)
            W = GridFunction(grid, v, True)
        return W
    if not isinstance(K, GridSet):
        raise TypeError(f"K must be a PlanarSet or GridSet, got {type(K).__name__}")
    if len(K) == 0:
        raise ValueError("set K must be nonempty")
    qn = parse_norm(q)
    x = grid.points
    kx, ky = (x[c] for c in np.nonzero(K.mask))
    X, Y = np.meshgrid(x, x, indexing="ij")
    best = np.full(X.shape, np.inf)
    for s in range(0, len(kx), 256):
        d = norm2(X[..., None] - kx[s:s + 256], Y[..., None] - ky[s:s + 256], qn)
        best = np.minimum(best, d.min(axis=-1))
    vals = best ** float(p)
    return GridFunction(grid, vals, bool(np.array_equal(vals, vals.T)))


# --------------------------------------------------------------------------
# convex envelope
# --------------------------------------------------------------------------

def convex_envelope(W: GridFunction, method: str = "hull") -> GridFunction:
    """Largest convex function below W at the grid nodes.

    ``method="hull"`` takes the lower facets of the lifted point cloud and is
    exact up to rounding. ``method="legendre"`` is the separable double
    Legendre-Fenchel transform on a dual grid twice as fine; it is a convex
    minorant of W whose error is controlled by the dual spacing.
    """
    if method == "hull":
        env = _hull_envelope(W.values)
    elif method == "legendre":
        env = _legendre_envelope(W.grid, W.values)
    else:
        raise ValueError(f"unknown method {method!r}")
    env = np.minimum(env, W.values)
    if W.symmetric:
        env = 0.5 * (env + env.T)
    return W.with_values(env, method=method)


def _hull_envelope(V: np.ndarray) -> np.ndarray:
    n = V.shape[0]
    I, J = np.meshgrid(np.arange(n, dtype=float), np.arange(n, dtype=float), indexing="ij")
    flat = V.ravel()
    # rescale heights so qhull sees a well-conditioned cloud
    span = float(flat.max() - flat.min())
    if span == 0.0:
        return V.copy()
    z = (flat - flat.min()) * (n / span)
    pts = np.column_stack([I.ravel(), J.ravel(), z])
    try:
        hull = ConvexHull(pts, qhull_options="Qt")
    except QhullError:
        # flat cloud: the samples are affine, hence their own envelope
        return V.copy()
    lower = hull.equations[:, 2] < -1e-12
    tri = np.ascontiguousarray(hull.simplices[lower], dtype=np.int64)
    env = kernels.raster_triangles(tri, n, np.ascontiguousarray(flat))
    missing = ~np.isfinite(env)
    if missing.any():
        env[missing] = V[missing]
    return env


def legendre_slopes(grid: ScalarGrid, V: np.ndarray, axis: int, factor: int = 2) -> np.ndarray:
    d = np.abs(np.diff(V, axis=axis)).max() / grid.h
    L = max(float(d), 1e-12) * (1.0 + 1e-9)
    return np.linspace(-L, L, factor * (grid.n - 1) + 1)


def _legendre_envelope(grid: ScalarGrid, V: np.ndarray, factor: int = 2) -> np.ndarray:
    x = grid.points
    s = legendre_slopes(grid, V, 0, factor)
    t = legendre_slopes(grid, V, 1, factor)
    conj = kernels.conjugate_rows
    # f*(s, t) = max_i [s x_i + max_j (t y_j - f_ij)]
    g = conj(np.ascontiguousarray(V), x, t)                      # (n_x, S_t)
    fstar = conj(np.ascontiguousarray(-g.T), x, s).T             # (S_s, S_t)
    # f**(x, y) = max_s [s x + max_t (t y - f*(s, t))]
    h = conj(np.ascontiguousarray(fstar), t, x)                  # (S_s, n_y)
    return conj(np.ascontiguousarray(-h.T), s, x).T              # (n_x, n_y)


# --------------------------------------------------------------------------
# separately convex envelope
# --------------------------------------------------------------------------

def default_tol(W: GridFunction) -> float:
    return 1e-9 * (1.0 + float(np.abs(W.values).max()))


def separately_convex_envelope(W: GridFunction, tol: float | None = None,
                               max_iter: int | None = None) -> GridFunction:
    """Alternate row-wise and column-wise 1D convex envelopes to a fixed point.

    Stops once a full sweep (rows, then columns) moves no value by ``tol`` or
    more. ``meta`` carries ``converged``, ``sweeps`` and ``change``.
    """
    if tol is None:
        tol = default_tol(W)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 10 * W.grid.n
    x = W.grid.points
    V = np.array(W.values, dtype=float)
    change = math.inf
    sweeps = 0
    while sweeps < max_iter:
        old = V
        V = kernels.lower_envelope_rows(np.ascontiguousarray(V), x)
        V = kernels.lower_envelope_rows(np.ascontiguousarray(V.T), x).T
        sweeps += 1
        change = float(np.abs(V - old).max())
        if change < tol:
            break
    converged = change < tol
    if W.symmetric:
        # the transpose is separately convex too, so the average stays admissible
        V = 0.5 * (V + V.T)
    return W.with_values(V, converged=converged, sweeps=sweeps, change=change)


def is_separately_convex(W: GridFunction, tol: float = 0.0) -> bool:
    """Second differences along every row and column are >= -tol."""
    V = W.values
    return bool((np.diff(V, 2, axis=0) >= -tol).all() and (np.diff(V, 2, axis=1) >= -tol).all())


# --------------------------------------------------------------------------
# separately level convex envelope
# --------------------------------------------------------------------------

def default_levels(W: GridFunction, count: int = 512) -> np.ndarray:
    return np.linspace(float(W.values.min()), float(W.values.max()), count)


def separately_level_convex_envelope(W: GridFunction, levels=None) -> GridFunction:
    """V(x) = least listed level c with x in the separately convex hull of {W <= c}.

    The value is capped by W(x) itself, which keeps V <= W at every node while
    staying within one level spacing of the exact envelope.
    ``meta["saturated"]`` flags nodes that never entered a hull and were
    given the top level.
    """
    if levels is None:
        levels = default_levels(W)
    levels = np.asarray(levels, dtype=float)
    if levels.ndim != 1 or len(levels) == 0 or np.any(np.diff(levels) < 0):
        raise ValueError("levels must be a nonempty ascending list")
    V = W.values
    out = np.full(V.shape, np.nan)
    todo = np.ones(V.shape, dtype=bool)
    for c in levels:
        sub = GridSet(W.grid, V <= c, W.symmetric)
        hull = separately_convex_hull_set(sub).mask
        hit = hull & todo
        out[hit] = c
        todo &= ~hit
        if not todo.any():
            break
    saturated = bool(todo.any())
    out[todo] = levels[-1]
    out = np.minimum(out, V)
    return W.with_values(out, saturated=saturated, n_levels=len(levels))


# --------------------------------------------------------------------------
# diagonalization and minima
# --------------------------------------------------------------------------

def diagonalize_function(W: GridFunction) -> GridFunction:
    """W_hat(i, j) = max(W(i, j), W(i, i), W(j, j))."""
    if not (W.symmetric or np.array_equal(W.values, W.values.T)):
        raise ValueError("diagonalize_function needs a symmetric function")
    d = np.diag(W.values)
    hat = np.maximum(W.values, np.maximum(d[:, None], d[None, :]))
    return GridFunction(W.grid, hat, True)


def grid_min(W: GridFunction) -> tuple[float, tuple[int, int]]:
    """Matrix minimum and its first row-major argmin."""
    k = int(np.argmin(W.values))
    i, j = divmod(k, W.grid.n)
    return float(W.values[i, j]), (i, j)

"""Set algebra on symmetric grid sets: diagonalization, hulls, Cartesian pieces."""
from __future__ import annotations

import numpy as np

from . import kernels
from .cliques import adjacency_from_mask, maximal_cliques
from .grid import CartesianPiece, GridSet


def _require_symmetric(E: GridSet, what: str) -> None:
    if not (E.symmetric or np.array_equal(E.mask, E.mask.T)):
        raise ValueError(f"{what} needs a symmetric set")


def diagonalize_set(E: GridSet) -> GridSet:
    """Keep (i, j) only when (i, i) and (j, j) are in E as well."""
    _require_symmetric(E, "diagonalize_set")
    d = np.diag(E.mask)
    return GridSet(E.grid, E.mask & d[:, None] & d[None, :], True)


def maximal_cartesian_subsets(E: GridSet) -> list[CartesianPiece]:
    """Every maximal A with A x A inside E.

    These are the maximal cliques of the graph on looped indices, sorted by
    size (largest first) and then lexicographically.
    """
    _require_symmetric(E, "maximal_cartesian_subsets")
    adj, loops = adjacency_from_mask(E.mask.tolist())
    if not loops:
        return []
    cliques = maximal_cliques(adj, loops)
    cliques.sort(key=lambda c: (-len(c), c))
    return [CartesianPiece(tuple(c), True) for c in cliques]


def separately_convex_hull_set(E: GridSet) -> GridSet:
    """Smallest grid set containing E whose rows and columns are contiguous runs."""
    return GridSet.from_mask(E.grid, kernels.sc_fill(np.ascontiguousarray(E.mask)))


def convex_hull_set(E: GridSet) -> GridSet:
    """Nodes inside (or on) the planar convex hull of the marked nodes.

    Works in integer index coordinates so the inclusion test is exact.
    """
    idx = np.argwhere(E.mask)
    if len(idx) == 0:
        raise ValueError("convex hull of an empty set")
    # only the extreme cells of every row can be hull vertices
    rows = {}
    for i, j in idx:
        lo, hi = rows.get(i, (j, j))
        rows[i] = (min(lo, j), max(hi, j))
    cand = sorted({(int(i), int(j)) for i, (lo, hi) in rows.items() for j in (lo, hi)})
    hull = _monotone_chain(cand)
    n = E.grid.n
    I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    if len(hull) == 1:
        mask = (I == hull[0][0]) & (J == hull[0][1])
    elif len(hull) == 2:
        (ai, aj), (bi, bj) = hull
        on_line = (bi - ai) * (J - aj) - (bj - aj) * (I - ai) == 0
        mask = (on_line & (I >= min(ai, bi)) & (I <= max(ai, bi))
                & (J >= min(aj, bj)) & (J <= max(aj, bj)))
    else:
        mask = np.ones((n, n), dtype=bool)
        for k in range(len(hull)):
            (ai, aj), (bi, bj) = hull[k], hull[(k + 1) % len(hull)]
            mask &= (bi - ai) * (J - aj) - (bj - aj) * (I - ai) >= 0
    return GridSet.from_mask(E.grid, mask)


def _monotone_chain(pts):
    if len(pts) <= 2:
        return list(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 2 else [pts[0], pts[-1]]


def relaxed_cartesian_union(E: GridSet) -> GridSet:
    """Union of the index squares [min A, max A]^2 over all maximal pieces A."""
    mask = np.zeros_like(E.mask)
    for piece in maximal_cartesian_subsets(E):
        mask[piece.lo:piece.hi + 1, piece.lo:piece.hi + 1] = True
    return GridSet(E.grid, mask, True)

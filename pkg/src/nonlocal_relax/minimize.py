"""Discrete minimization of double integrals over piecewise-constant fields.

Fields have a fixed number of pieces with prescribed fractions, optionally
grouped into regions whose means are constrained. Small piece counts are
swept exhaustively over a value grid; larger ones are swept on a coarsened
grid. The best candidates are then refined by steepest descent with step
halving.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .envelopes import diagonalize_function, distance_integrand, grid_min
from .functionals import PairRule, eval_double_integral, pair_values
from .grid import GridFunction, PiecewiseConstantField, ScalarGrid, sample_function
from .rules import DistanceRule

EXHAUSTIVE_MAX = 3
SWEEP_BUDGET = 2_000_000
REGION_BUDGET = 3_000


@dataclass
class MinimizationReport:
    best_value: float
    best_field: PiecewiseConstantField
    lower_bound: float
    upper_bound: float
    pieces: int
    swept: int = 0
    exhaustive: bool = False
    refine_rounds: int = 0
    descent_moves: int = 0
    converged: bool = True
    mean_constraint: float | None = None

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_field": {"values": list(self.best_field.values),
                           "fractions": list(self.best_field.fractions),
                           "omega": self.best_field.omega_measure},
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "pieces": self.pieces,
            "mean_constraint": self.mean_constraint,
            "trace": {"swept": self.swept, "exhaustive": self.exhaustive,
                      "refine_rounds": self.refine_rounds,
                      "descent_moves": self.descent_moves, "converged": self.converged},
        }


# --------------------------------------------------------------------------
# candidate enumeration
# --------------------------------------------------------------------------

def sorted_tuples(m: int, N: int) -> np.ndarray:
    """All nondecreasing index tuples of length N over range(m), lexicographic."""
    T = np.arange(m, dtype=np.int64)[:, None]
    for _ in range(N - 1):
        last = T[:, -1]
        counts = m - last
        starts = np.repeat(last, counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        T = np.column_stack([np.repeat(T, counts, axis=0), starts + offs])
    return T


def _count_sorted(m: int, N: int) -> int:
    return math.comb(m + N - 1, N)


def _coarse_stride(m: int, N: int, budget: int) -> int:
    s = 1
    while _count_sorted(len(range(0, m, s)), N) > budget:
        s += 1
    return s


def region_candidates(m: int, N: int, sums: np.ndarray | None, budget: int,
                      exhaustive: bool) -> tuple[np.ndarray, int]:
    """Index tuples for one region and the coarse stride used.

    ``sums`` lists the admissible index sums (None: unconstrained). With a
    sum constraint the last entry is solved for on the fine grid.
    """
    if sums is None:
        if exhaustive:
            return sorted_tuples(m, N), 1
        s = _coarse_stride(m, N, budget)
        coarse = np.arange(0, m, s)
        return coarse[sorted_tuples(len(coarse), N)], s
    sums = np.asarray(sums, dtype=np.int64)
    if N == 1:
        T = sums[(sums >= 0) & (sums < m)][:, None]
        return T, 1
    if exhaustive:
        head, s = sorted_tuples(m, N - 1), 1
    else:
        s = _coarse_stride(m, N - 1, budget)
        coarse = np.arange(0, m, s)
        head = coarse[sorted_tuples(len(coarse), N - 1)]
    rest = head.sum(axis=1)
    out = []
    for S in sums:
        last = S - rest
        ok = (last >= 0) & (last < m)
        if exhaustive:
            ok &= last >= head[:, -1]
        out.append(np.column_stack([head[ok], last[ok]]))
    T = np.concatenate(out) if out else np.empty((0, N), dtype=np.int64)
    return T, s


# --------------------------------------------------------------------------
# descent
# --------------------------------------------------------------------------

class _Objective:
    def __init__(self, W: PairRule, weights: np.ndarray, omega: float):
        self.W = W
        self.w = np.asarray(weights, dtype=float)
        self.scale = omega ** 2

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        F = pair_values(self.W, X[:, :, None], X[:, None, :])
        return self.scale * np.einsum("cij,i,j->c", F, self.w, self.w)


def _moves(P: int, groups: Sequence[Sequence[int]] | None) -> np.ndarray:
    """Displacement directions: single coordinates, or mean-preserving pairs.

    Within each coordinate the downward move comes first, so ties go to the
    smaller value.
    """
    dirs = []
    if groups is None:
        for i in range(P):
            for sgn in (-1, 1):
                d = np.zeros(P, dtype=np.int64)
                d[i] = sgn
                dirs.append(d)
    else:
        for g in groups:
            for a in g:
                for b in g:
                    if a != b:
                        d = np.zeros(P, dtype=np.int64)
                        d[a] = -1
                        d[b] = 1
                        dirs.append(d)
    return np.array(dirs, dtype=np.int64).reshape(-1, P)


class Lattice:
    """Refinement of a value grid by 2**rounds; descent runs on its indices."""

    def __init__(self, vg: ScalarGrid, rounds: int, box: tuple[float, float] | None = None):
        self.factor = 2 ** rounds
        self.grid = ScalarGrid(vg.lo, vg.hi, (vg.n - 1) * self.factor + 1)
        self.points = self.grid.points
        lo, hi = (vg.lo, vg.hi) if box is None else (max(vg.lo, box[0]), min(vg.hi, box[1]))
        d = self.grid.h
        self.lo = int(math.ceil((lo - vg.lo) / d - 1e-9))
        self.hi = int(math.floor((hi - vg.lo) / d + 1e-9))

    def from_coarse(self, idx) -> np.ndarray:
        return np.asarray(idx, dtype=np.int64) * self.factor

    def from_values(self, x) -> np.ndarray:
        k = np.rint((np.asarray(x, dtype=float) - self.grid.lo) / self.grid.h).astype(np.int64)
        return np.clip(k, self.lo, self.hi)


def descend(obj: _Objective, lat: Lattice, k0, step0: int, groups=None, max_moves: int = 5000):
    """Steepest descent over +-step index moves, halving the step when stuck.

    Returns (indices, energy, moves, converged).
    """
    k = np.array(k0, dtype=np.int64)
    pts = lat.points
    e = float(obj(pts[k])[0])
    D = _moves(len(k), groups)
    if len(D) == 0:
        return k, e, 0, True
    step = max(int(step0), 1)
    moves = 0
    while step >= 1 and moves < max_moves:
        C = k + step * D
        ok = np.all((C >= lat.lo) & (C <= lat.hi), axis=1)
        if not ok.any():
            step //= 2
            continue
        E = np.full(len(C), np.inf)
        E[ok] = obj(pts[C[ok]])
        b = int(np.argmin(E))
        if E[b] < e - 1e-15 * (1.0 + abs(e)):
            k, e = C[b], float(E[b])
            moves += 1
        else:
            step //= 2
    return k, e, moves, moves < max_moves


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------

def _value_matrix(W: PairRule, vg: ScalarGrid) -> np.ndarray:
    if isinstance(W, GridFunction) and W.grid == vg:
        return np.ascontiguousarray(W.values)
    v = vg.points
    return np.ascontiguousarray(pair_values(W, v[:, None], v[None, :]), dtype=float)


def min_bounds(W: GridFunction, omega: float = 1.0) -> tuple[float, float]:
    """(|Omega|^2 min W, |Omega|^2 min W_hat)."""
    return omega ** 2 * grid_min(W)[0], omega ** 2 * grid_min(diagonalize_function(W))[0]


def _bounds_for(W: PairRule, vg: ScalarGrid, omega: float) -> tuple[float, float]:
    if isinstance(W, GridFunction):
        G = W
    elif isinstance(W, DistanceRule):
        G = distance_integrand(vg, W.K, W.p, W.q)
    else:
        G = sample_function(vg, W)
    return min_bounds(G, omega)


def _expand_seed(seed: PiecewiseConstantField, N: int) -> list[float] | None:
    k = len(seed.values)
    if N % k or len(set(seed.fractions)) != 1:
        return None
    return sorted(v for v in seed.values for _ in range(N // k))


def minimize_discrete(W: PairRule, N: int, value_grid: ScalarGrid, refine_rounds: int = 3,
                      mean_constraint: float | None = None, omega: float = 1.0,
                      starts: int = 8, seeds: Sequence[PiecewiseConstantField] = ()) -> MinimizationReport:
    """Minimize I_W over fields of N equal pieces with values near ``value_grid``.

    N <= 3 sweeps every sorted assignment; larger N sweeps a coarsened grid.
    Descent then refines the best ``starts`` candidates down to step
    ``h / 2**refine_rounds``. A mean constraint admits only fields whose mean
    is within h/2 of the target and is kept by pairwise moves.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    vg = value_grid
    m, h = vg.n, vg.h
    w = np.full(N, 1.0 / N)
    M = _value_matrix(W, vg)
    exhaustive = N <= EXHAUSTIVE_MAX
    sums = None
    if mean_constraint is not None:
        target = N * (mean_constraint - vg.lo) / h
        sums = np.arange(math.ceil(target - N / 2 - 1e-9), math.floor(target + N / 2 + 1e-9) + 1)
        if len(sums) == 0 or sums.max() < 0 or sums.min() > N * (m - 1):
            raise ValueError(f"mean constraint {mean_constraint} is infeasible on the value grid")
    T, stride = region_candidates(m, N, sums, SWEEP_BUDGET, exhaustive)
    if mean_constraint is None:
        const = np.repeat(np.arange(m)[:, None], N, axis=1)
        T = np.concatenate([T, const]) if not exhaustive else T
    if len(T) == 0:
        raise ValueError(f"mean constraint {mean_constraint} is infeasible on the value grid")
    E = omega ** 2 * kernels.pair_energies(M, np.ascontiguousarray(T, dtype=np.int64), w)
    order = np.lexsort((np.arange(len(E)), E))
    box = (W.grid.lo, W.grid.hi) if isinstance(W, GridFunction) else None
    lat = Lattice(vg, refine_rounds, box)
    K0 = [lat.from_coarse(np.sort(T[k])) for k in order[:starts]]
    for s in seeds:
        x = _expand_seed(s, N)
        if x is not None and (mean_constraint is None or abs(np.mean(x) - mean_constraint) <= h / 2):
            K0.append(lat.from_values(x))

    obj = _Objective(W, w, omega)
    groups = None if mean_constraint is None else [list(range(N))]
    best_k, best_e, moves, conv = None, math.inf, 0, True
    for k0 in K0:
        k, e, mv, ok = descend(obj, lat, k0, stride * lat.factor, groups)
        moves += mv
        conv &= ok
        # ties keep the earlier start, which comes first in sweep order
        if e < best_e:
            best_k, best_e = np.sort(k), e
    if best_k is None:
        best_k = np.sort(K0[0])
    best_x = lat.points[best_k]
    best_field = PiecewiseConstantField.equal_pieces(sorted(float(a) for a in best_x), omega)
    lower, upper = _bounds_for(W, vg, omega)
    return MinimizationReport(
        best_value=eval_double_integral(W, best_field), best_field=best_field,
        lower_bound=lower, upper_bound=upper, pieces=N, swept=len(T),
        exhaustive=exhaustive and stride == 1, refine_rounds=refine_rounds,
        descent_moves=moves, converged=conv, mean_constraint=mean_constraint)


def minimize_scan(W: PairRule, ns: Sequence[int], value_grid: ScalarGrid, **kw) -> list[MinimizationReport]:
    """minimize_discrete for each N, seeding every N with the results of its divisors."""
    out: list[MinimizationReport] = []
    for N in ns:
        seeds = [r.best_field for r in out if N % r.pieces == 0]
        out.append(minimize_discrete(W, N, value_grid, seeds=seeds, **kw))
    return out


# --------------------------------------------------------------------------
# two-region minimization with exact region means
# --------------------------------------------------------------------------

@dataclass
class TwoRegionResult:
    values: np.ndarray
    weights: np.ndarray
    regions: tuple[list[int], list[int]]
    energy: float
    swept: int
    exhaustive: bool
    moves: int


def minimize_two_regions(W: PairRule, fractions: tuple[float, float], means: tuple[float, float],
                         N: int, value_grid: ScalarGrid, refine_rounds: int = 4, omega: float = 1.0,
                         starts: int = 8, seeds: Sequence[np.ndarray] = ()) -> TwoRegionResult:
    """Minimize I_W over 2N pieces: N equal pieces per region, exact region means.

    Region means must be grid nodes. Pieces 0..N-1 belong to the first region.
    """
    vg = value_grid
    m = vg.n
    idx = [vg.index_of(mu) for mu in means]
    if any(k is None for k in idx):
        raise ValueError(f"region means {means} must be nodes of the value grid")
    M = _value_matrix(W, vg)
    exhaustive = N <= EXHAUSTIVE_MAX
    w1 = np.full(N, fractions[0] / N)
    w0 = np.full(N, fractions[1] / N)
    T1, s1 = region_candidates(m, N, np.array([N * idx[0]]), REGION_BUDGET, exhaustive)
    T0, s0 = region_candidates(m, N, np.array([N * idx[1]]), REGION_BUDGET, exhaustive)
    S1 = kernels.pair_energies(M, np.ascontiguousarray(T1), w1)
    S0 = kernels.pair_energies(M, np.ascontiguousarray(T0), w0)
    A1 = np.einsum("i,cim->cm", w1, M[T1])          # (R1, m)
    keep = []
    for b in range(0, len(T1), 512):
        C = (A1[b:b + 512][:, T0] * w0).sum(axis=2)  # (B, R0)
        E = S1[b:b + 512, None] + S0[None, :] + 2.0 * C
        flat = E.ravel()
        k = min(starts, flat.size)
        part = np.argpartition(flat, k - 1)[:k]
        for f in part:
            r, c = divmod(int(f), E.shape[1])
            keep.append((float(flat[f]), b + r, c))
    keep.sort()
    box = (W.grid.lo, W.grid.hi) if isinstance(W, GridFunction) else None
    lat = Lattice(vg, refine_rounds, box)
    K0 = [lat.from_coarse(np.concatenate([T1[r], T0[c]])) for _, r, c in keep[:starts]]
    K0.extend(lat.from_values(s) for s in seeds)

    weights = np.concatenate([w1, w0])
    obj = _Objective(W, weights, omega)
    groups = [list(range(N)), list(range(N, 2 * N))]
    best_k, best_e = None, math.inf
    moves = 0
    for k0 in K0:
        k, e, mv, _ = descend(obj, lat, k0, max(s1, s0) * lat.factor, groups)
        moves += mv
        if best_k is None or e < best_e:
            best_k, best_e = np.concatenate([np.sort(k[:N]), np.sort(k[N:])]), e
    best = (lat.points[best_k], best_e)
    return TwoRegionResult(best[0], weights, (list(range(N)), list(range(N, 2 * N))),
                           best[1], len(T1) * len(T0), exhaustive and s1 == 1 and s0 == 1, moves)

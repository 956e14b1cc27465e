"""Value grids, grid-sampled functions and sets, piecewise-constant fields."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

import numpy as np


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarGrid:
    """Uniform grid ``lo, lo + h, ..., hi`` on one value axis.

    Nodes are computed as the weighted average ``(lo*(n-1-k) + hi*k)/(n-1)``
    so that symmetric grids are exactly antisymmetric and hit 0 on odd ``n``.
    """

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError(f"need finite lo < hi, got lo={self.lo}, hi={self.hi}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need an integer n >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        k = np.arange(self.n, dtype=float)
        m = self.n - 1
        return (self.lo * (m - k) + self.hi * k) / m

    def index_of(self, value: float, atol: float | None = None) -> int | None:
        """Index of the node equal to ``value`` (within ``atol``), else None."""
        if atol is None:
            atol = 1e-9 * self.h
        k = int(round((value - self.lo) / self.h))
        if 0 <= k < self.n and abs(self.points[k] - value) <= atol:
            return k
        return None

    def locate(self, value: float) -> tuple[int, float]:
        """Cell ``k`` and offset ``t`` in [0, 1] with value = (1-t) x_k + t x_{k+1}."""
        if not (self.lo <= value <= self.hi):
            raise ValueError(f"value {value!r} lies outside the grid box [{self.lo}, {self.hi}]")
        k = self.index_of(value)
        if k is not None:
            return (k, 0.0) if k < self.n - 1 else (self.n - 2, 1.0)
        s = (value - self.lo) / self.h
        k = min(int(math.floor(s)), self.n - 2)
        pts = self.points
        return k, (value - pts[k]) / (pts[k + 1] - pts[k])

    def refined(self, factor: int = 2) -> "ScalarGrid":
        return ScalarGrid(self.lo, self.hi, (self.n - 1) * factor + 1)


def default_grid() -> ScalarGrid:
    return ScalarGrid(-3.0, 3.0, 241)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """W sampled on the product grid; ``values[i, j] = W(x_i, x_j)``."""

    grid: ScalarGrid
    values: np.ndarray
    symmetric: bool = False
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        v = _frozen(self.values, float)
        n = self.grid.n
        if v.shape != (n, n):
            raise ValueError(f"values must have shape {(n, n)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            i, j = np.argwhere(~np.isfinite(v))[0]
            x = self.grid.points
            raise ValueError(f"non-finite value at grid point ({x[i]!r}, {x[j]!r})")
        if self.symmetric and not np.array_equal(v, v.T):
            raise ValueError("symmetric flag set but values differ from their transpose")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def __call__(self, x, y):
        return interpolate(self, x, y)

    def with_values(self, values, symmetric=None, **meta) -> "GridFunction":
        if symmetric is None:
            symmetric = bool(np.array_equal(values, np.asarray(values).T))
        return GridFunction(self.grid, values, symmetric, meta)


@dataclass(frozen=True, eq=False)
class GridSet:
    """Boolean mask on the product grid."""

    grid: ScalarGrid
    mask: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        m = _frozen(self.mask, bool)
        n = self.grid.n
        if m.shape != (n, n):
            raise ValueError(f"mask must have shape {(n, n)}, got {m.shape}")
        if self.symmetric and not np.array_equal(m, m.T):
            raise ValueError("symmetric flag set but mask differs from its transpose")
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_mask(cls, grid: ScalarGrid, mask) -> "GridSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(grid, mask, bool(np.array_equal(mask, mask.T)))

    @classmethod
    def from_points(cls, grid: ScalarGrid, points) -> "GridSet":
        """Mask of the nodes at the given (xi, zeta) pairs; off-grid pairs raise."""
        mask = np.zeros((grid.n, grid.n), dtype=bool)
        for a, b in points:
            i, j = grid.index_of(a), grid.index_of(b)
            if i is None or j is None:
                raise ValueError(f"point ({a}, {b}) is not a grid node")
            mask[i, j] = True
        return cls.from_mask(grid, mask)

    def __len__(self):
        return int(self.mask.sum())

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.mask, other.mask)

    def __le__(self, other: "GridSet") -> bool:
        return bool(np.all(~self.mask | other.mask))

    def points(self) -> list[tuple[float, float]]:
        x = self.grid.points
        return [(float(x[i]), float(x[j])) for i, j in np.argwhere(self.mask)]

    def contains(self, xi: float, zeta: float) -> bool:
        """Membership of an arbitrary point.

        A node is in the set iff it is marked; an off-grid point is in the set
        iff every node of the smallest grid cell containing it is marked.
        Points outside the grid box are never members.
        """
        g = self.grid
        if not (g.lo <= xi <= g.hi and g.lo <= zeta <= g.hi):
            return False
        ii = _bracket(g, xi)
        jj = _bracket(g, zeta)
        return bool(all(self.mask[i, j] for i in ii for j in jj))


def _bracket(grid: ScalarGrid, value: float) -> tuple[int, ...]:
    k = grid.index_of(value)
    if k is not None:
        return (k,)
    k, _ = grid.locate(value)
    return (k, k + 1)


@dataclass(frozen=True)
class PiecewiseConstantField:
    """u = sum_i values[i] * 1_{Omega_i} with |Omega_i| = fractions[i] * |Omega|."""

    values: tuple[float, ...]
    fractions: tuple[float, ...]
    omega_measure: float = 1.0

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        fr = tuple(float(f) for f in self.fractions)
        if len(vals) == 0:
            raise ValueError("a field needs at least one piece")
        if len(vals) != len(fr):
            raise ValueError(f"{len(vals)} values but {len(fr)} fractions")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("field values must be finite")
        if any(not f > 0 for f in fr):
            raise ValueError("fractions must be positive")
        if abs(math.fsum(fr) - 1.0) > 1e-12:
            raise ValueError(f"fractions sum to {math.fsum(fr)!r}, expected 1")
        if not self.omega_measure > 0:
            raise ValueError("omega_measure must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "fractions", fr)
        object.__setattr__(self, "omega_measure", float(self.omega_measure))

    @classmethod
    def constant(cls, value: float, omega_measure: float = 1.0) -> "PiecewiseConstantField":
        return cls((value,), (1.0,), omega_measure)

    @classmethod
    def equal_pieces(cls, values: Sequence[float], omega_measure: float = 1.0) -> "PiecewiseConstantField":
        n = len(values)
        return cls(tuple(values), (1.0 / n,) * n, omega_measure)

    def __len__(self):
        return len(self.values)

    def mean(self) -> float:
        return math.fsum(v * f for v, f in zip(self.values, self.fractions))

    def distribution(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Distinct values (ascending) with their total fractions."""
        acc: dict[float, list[float]] = {}
        for v, f in zip(self.values, self.fractions):
            acc.setdefault(v + 0.0, []).append(f)
        keys = sorted(acc)
        return tuple(keys), tuple(math.fsum(acc[k]) for k in keys)


@dataclass(frozen=True)
class CartesianPiece:
    """Index set A of a square A x A contained in a grid set."""

    members: tuple[int, ...]
    maximal: bool = True

    def __post_init__(self):
        m = tuple(sorted(set(int(k) for k in self.members)))
        if len(m) != len(self.members):
            raise ValueError("members must be distinct")
        object.__setattr__(self, "members", m)

    @property
    def lo(self) -> int:
        return self.members[0]

    @property
    def hi(self) -> int:
        return self.members[-1]

    def values(self, grid: ScalarGrid) -> list[float]:
        x = grid.points
        return [float(x[k]) for k in self.members]


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def sample_function(grid: ScalarGrid, f: Callable) -> GridFunction:
    """Evaluate ``f(xi, zeta)`` on every node pair.

    ``f`` is called once with broadcast 2D arrays; rules that only accept
    scalars are retried element by element.
    """
    x = grid.points
    X, Y = np.meshgrid(x, x, indexing="ij")
    try:
        vals = np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape).copy()
    except (TypeError, ValueError):
        vals = np.vectorize(lambda a, b: float(f(a, b)), otypes=[float])(X, Y)
    if not np.all(np.isfinite(vals)):
        i, j = np.argwhere(~np.isfinite(vals))[0]
        raise ValueError(f"rule is not finite at sample point ({x[i]!r}, {x[j]!r})")
    return GridFunction(grid, vals, bool(np.array_equal(vals, vals.T)))


def default_level_eps(c: float) -> float:
    return 1e-9 * (1.0 + abs(c))


def level_set(W: GridFunction, c: float, eps: float | None = None) -> GridSet:
    """Sublevel set {W <= c + eps}."""
    if eps is None:
        eps = default_level_eps(c)
    return GridSet(W.grid, W.values <= c + eps, W.symmetric)


def interpolate(W: GridFunction, x, y):
    """Bilinear interpolation of a grid function; exact at nodes.

    Raises ValueError naming the first value outside the grid box.
    """
    g = W.grid
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    for arr in (xa, ya):
        bad = (arr < g.lo) | (arr > g.hi) | ~np.isfinite(arr)
        if np.any(bad):
            raise ValueError(f"value {float(arr[bad].flat[0])!r} lies outside the grid box [{g.lo}, {g.hi}]")
    xa, ya = np.broadcast_arrays(xa, ya)
    i, s = _cells(g, xa)
    j, t = _cells(g, ya)
    V = W.values
    out = ((1 - s) * (1 - t) * V[i, j] + s * (1 - t) * V[i + 1, j]
           + (1 - s) * t * V[i, j + 1] + s * t * V[i + 1, j + 1])
    return out if out.ndim else float(out)


def _cells(g: ScalarGrid, a: np.ndarray):
    pts = g.points
    s = (a - g.lo) / g.h
    k = np.clip(np.floor(s).astype(np.int64), 0, g.n - 2)
    near = np.rint(s).astype(np.int64)
    near_c = np.clip(near, 0, g.n - 1)
    on_node = np.abs(pts[near_c] - a) <= 1e-9 * g.h
    k = np.where(on_node, np.minimum(near_c, g.n - 2), k)
    t = np.where(on_node, np.where(near_c == g.n - 1, 1.0, 0.0),
                 (a - pts[k]) / (pts[k + 1] - pts[k]))
    return k, t


def boundary_tainted(grid: ScalarGrid, margin: float = 1.0) -> np.ndarray:
    """Cells within ``margin`` of the box boundary (excluded from sup-norm checks)."""
    x = grid.points
    d = np.minimum(x - grid.lo, grid.hi - x)
    near = d < margin - 1e-12 * grid.h
    return near[:, None] | near[None, :]

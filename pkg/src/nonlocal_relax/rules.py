"""Exact planar sets and the closed-form integrands built on them.

Every set here is a finite union of points and segments in the
(xi, zeta) plane, which covers the three families used throughout:
finite well sets, the boundary of an l1 ball, and Cartesian squares A x A
of a finite A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import GridSet, ScalarGrid

_MEMBER_ATOL = 1e-12


def parse_norm(q) -> float:
    """Norm selector: 1, 2, ... or 'inf'."""
    if isinstance(q, str):
        if q.strip().lower() in {"inf", "infinity", "max"}:
            return math.inf
        q = float(q)
    q = float(q)
    if not q >= 1:
        raise ValueError(f"norm exponent must be >= 1 or 'inf', got {q}")
    return q


def norm2(dx, dy, q: float):
    """q-norm of planar vectors given componentwise."""
    ax, ay = np.abs(dx), np.abs(dy)
    if q == 1:
        return ax + ay
    if q == 2:
        return np.hypot(ax, ay)
    if math.isinf(q):
        return np.maximum(ax, ay)
    return (ax ** q + ay ** q) ** (1.0 / q)


def _segment_distance(X, Y, a, b, q: float):
    ax, ay = a
    ex, ey = b[0] - a[0], b[1] - a[1]
    dx, dy = X - ax, Y - ay
    if ex == 0 and ey == 0:
        return norm2(dx, dy, q)
    if q == 2:
        t = np.clip((dx * ex + dy * ey) / (ex * ex + ey * ey), 0.0, 1.0)
        return np.hypot(dx - t * ex, dy - t * ey)
    if q == 1 or math.isinf(q):
        # piecewise-linear convex in t: minimum sits at a breakpoint
        cands = [np.zeros_like(dx), np.ones_like(dx)]
        with np.errstate(divide="ignore", invalid="ignore"):
            if ex != 0:
                cands.append(dx / ex)
            if ey != 0:
                cands.append(dy / ey)
            if math.isinf(q):
                if ex != ey:
                    cands.append((dx - dy) / (ex - ey))
                if ex != -ey:
                    cands.append((dx + dy) / (ex + ey))
        best = None
        for t in cands:
            t = np.clip(np.nan_to_num(t, nan=0.0), 0.0, 1.0)
            d = norm2(dx - t * ex, dy - t * ey, q)
            best = d if best is None else np.minimum(best, d)
        return best
    lo = np.zeros_like(dx, dtype=float)
    hi = np.ones_like(dx, dtype=float)
    for _ in range(100):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        f1 = norm2(dx - m1 * ex, dy - m1 * ey, q)
        f2 = norm2(dx - m2 * ex, dy - m2 * ey, q)
        left = f1 <= f2
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    t = 0.5 * (lo + hi)
    return np.minimum(norm2(dx - t * ex, dy - t * ey, q),
                      np.minimum(norm2(dx, dy, q), norm2(dx - ex, dy - ey, q)))


@dataclass(frozen=True)
class PlanarSet:
    """Finite union of points and closed segments."""

    points: tuple[tuple[float, float], ...] = ()
    segments: tuple[tuple[tuple[float, float], tuple[float, float]], ...] = ()
    label: str = ""

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.points)
        segs = tuple(((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))) for a, b in self.segments)
        if not pts and not segs:
            raise ValueError("set K must be nonempty")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "segments", segs)

    def distance(self, X, Y, q=1.0):
        q = parse_norm(q)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        best = np.full(np.broadcast(X, Y).shape, np.inf)
        for px, py in self.points:
            best = np.minimum(best, norm2(X - px, Y - py, q))
        for a, b in self.segments:
            best = np.minimum(best, _segment_distance(X, Y, a, b, q))
        return best

    def contains(self, X, Y, atol: float = _MEMBER_ATOL):
        return self.distance(X, Y, math.inf) <= atol

    def extreme_points(self) -> list[tuple[float, float]]:
        pts = list(self.points)
        for a, b in self.segments:
            pts.extend([a, b])
        return pts

    def mirrored(self) -> "PlanarSet":
        return PlanarSet(tuple((b, a) for a, b in self.points),
                         tuple(((a[1], a[0]), (b[1], b[0])) for a, b in self.segments), self.label)

    @property
    def is_symmetric(self) -> bool:
        m = self.mirrored()
        return (set(m.points) == set(self.points)
                and {frozenset(s) for s in m.segments} == {frozenset(s) for s in self.segments})

    def grid_trace(self, grid: ScalarGrid, atol: float | None = None) -> GridSet:
        """Nodes lying on the set (up to ``atol``, default 1e-9 h)."""
        if atol is None:
            atol = 1e-9 * grid.h
        x = grid.points
        X, Y = np.meshgrid(x, x, indexing="ij")
        return GridSet.from_mask(grid, self.distance(X, Y, math.inf) <= atol)


def well_set(points: Sequence[Sequence[float]], label: str = "points") -> PlanarSet:
    return PlanarSet(points=tuple(tuple(p) for p in points), label=label)


def l1_sphere(radius: float = 1.0) -> PlanarSet:
    """{|xi| + |zeta| = radius} as four segments."""
    r = float(radius)
    if not r > 0:
        raise ValueError("radius must be positive")
    c = [(r, 0.0), (0.0, r), (-r, 0.0), (0.0, -r)]
    return PlanarSet(segments=tuple((c[k], c[(k + 1) % 4]) for k in range(4)), label="norm_sphere")


def cartesian_square(A: Sequence[float]) -> PlanarSet:
    """A x A for a finite A."""
    A = sorted(set(float(a) for a in A))
    if not A:
        raise ValueError("A must be nonempty")
    return PlanarSet(points=tuple((a, b) for a in A for b in A), label="cartesian")


def convex_hull_points(points) -> list[tuple[float, float]]:
    """Counter-clockwise hull vertices (Andrew's monotone chain)."""
    pts = sorted(set((float(a), float(b)) for a, b in points))
    if len(pts) <= 2:
        return pts

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
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class ConvexRegion:
    """Closed convex polygon (possibly degenerate) given by its vertices."""

    vertices: tuple[tuple[float, float], ...]

    @classmethod
    def hull_of(cls, K: PlanarSet) -> "ConvexRegion":
        return cls(tuple(convex_hull_points(K.extreme_points())))

    def distance(self, X, Y, q=1.0):
        q = parse_norm(q)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        v = self.vertices
        if len(v) == 1:
            return norm2(X - v[0][0], Y - v[0][1], q)
        edges = [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))] if len(v) > 2 else [(v[0], v[1])]
        d = PlanarSet(segments=tuple(edges)).distance(X, Y, q)
        if len(v) > 2:
            inside = np.ones(d.shape, dtype=bool)
            for a, b in edges:
                inside &= (b[0] - a[0]) * (Y - a[1]) - (b[1] - a[1]) * (X - a[0]) >= 0
            d = np.where(inside, 0.0, d)
        return d


@dataclass(frozen=True)
class DistanceRule:
    """W(xi, zeta) = dist_q((xi, zeta), K)^p with K exact."""

    K: PlanarSet
    p: float = 2.0
    q: float = 1.0

    def __post_init__(self):
        if not float(self.p) >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", parse_norm(self.q))

    def __call__(self, xi, zeta):
        d = self.K.distance(xi, zeta, self.q)
        out = d ** self.p
        return out if np.ndim(out) else float(out)

    @property
    def symmetric(self) -> bool:
        return self.K.is_symmetric


def interval_distance(x, lo: float, hi: float):
    return np.maximum(0.0, np.maximum(lo - np.asarray(x, dtype=float), np.asarray(x, dtype=float) - hi))


@dataclass(frozen=True)
class CartesianScRule:
    """Closed form of the separately convex envelope of dist_q^p(., A x A).

    It equals dist_q^p(., [min A, max A]^2), written through the 1D distances
    to the interval.
    """

    A: tuple[float, ...]
    p: float = 2.0
    q: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(sorted(set(float(a) for a in self.A))))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", parse_norm(self.q))

    def __call__(self, xi, zeta):
        lo, hi = self.A[0], self.A[-1]
        a = interval_distance(xi, lo, hi)
        b = interval_distance(zeta, lo, hi)
        out = norm2(a, b, self.q) ** self.p
        return out if np.ndim(out) else float(out)

    symmetric = True

"""Verification pipelines for the example sets and the two-region gap experiment."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conditions import FAILS, HOLDS, NOT_APPLICABLE, check_minhat_condition, check_ness_condition
from .envelopes import convex_envelope, default_tol, diagonalize_function, separately_convex_envelope
from .functionals import (check_relaxed_inclusion, eval_double_integral, eval_indicator,
                          eval_relaxed_indicator, pair_values)
from .grid import GridSet, PiecewiseConstantField, ScalarGrid, boundary_tainted, default_grid
from .minimize import min_bounds, minimize_discrete, minimize_scan, minimize_two_regions
from .rules import CartesianScRule, ConvexRegion, DistanceRule, l1_sphere
from .scenario import preset
from .sequences import recovery_sequence_cartesian
from .sets import (convex_hull_set, diagonalize_set, maximal_cartesian_subsets,
                   relaxed_cartesian_union, separately_convex_hull_set)

CO_TOL = 0.15


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


@dataclass
class Finding:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": _clean(self.detail)}


@dataclass
class VerifyReport:
    preset: str
    findings: list[Finding] = field(default_factory=list)
    converged: bool = True

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.findings)

    def add(self, name: str, passed, **detail) -> Finding:
        f = Finding(name, bool(passed), detail)
        self.findings.append(f)
        return f

    def __getitem__(self, name: str) -> Finding:
        for f in self.findings:
            if f.name == name:
                return f
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"preset": self.preset, "passed": self.passed, "converged": self.converged,
                "findings": [f.to_dict() for f in self.findings]}


def _sup(a, b, keep) -> float:
    return float(np.abs(a.values - b.values)[keep].max())


def _square_mask(grid: ScalarGrid, lo: float, hi: float) -> GridSet:
    x = grid.points
    tol = 1e-9 * grid.h
    inside = (x >= lo - tol) & (x <= hi + tol)
    return GridSet(grid, inside[:, None] & inside[None, :], True)


# --------------------------------------------------------------------------
# two-region gap experiment
# --------------------------------------------------------------------------

@dataclass
class GapReport:
    fraction: float
    pieces: int
    p: float
    target: float
    minimum: float
    same_region: tuple[float, float]
    cross: float
    field: PiecewiseConstantField
    exhaustive: bool
    swept: int

    @property
    def delta(self) -> float:
        return self.minimum - self.target

    @property
    def decomposition_error(self) -> float:
        return abs(self.minimum - (self.same_region[0] + self.same_region[1] + 2.0 * self.cross))

    def to_dict(self) -> dict:
        return {"fraction": self.fraction, "pieces": self.pieces, "p": self.p, "target": self.target,
                "minimum": self.minimum, "delta": self.delta,
                "same_region": list(self.same_region), "cross": self.cross,
                "values": list(self.field.values), "fractions": list(self.field.fractions),
                "exhaustive": self.exhaustive, "swept": self.swept}


def _block(W, x, wx, y, wy) -> float:
    F = pair_values(W, np.asarray(x)[:, None], np.asarray(y)[None, :])
    return math.fsum((np.asarray(wx)[:, None] * np.asarray(wy)[None, :] * F).ravel().tolist())


def gap_experiment_diamond_boundary(fraction: float = 0.5, n_pieces: int = 1, p: float = 1.0,
                                    value_grid: ScalarGrid | None = None, refine_rounds: int = 4,
                                    omega: float = 1.0, seeds: Sequence[np.ndarray] = ()) -> GapReport:
    """Least I_W over fields with region means 1 (on a fraction) and 0 (elsewhere).

    W = dist_1^p(., {|xi| + |zeta| = 1}); each region is split into
    ``n_pieces`` equal sub-pieces. The target is I_{W^sc}(v) for the
    two-valued v, and the minimum splits into two same-region sums and the
    cross term.
    """
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    if value_grid is None:
        value_grid = ScalarGrid(-2.0, 3.0, 101)
    D = l1_sphere(1.0)
    W = DistanceRule(D, p, 1)
    region = ConvexRegion.hull_of(D)
    Wsc = lambda X, Y: region.distance(X, Y, 1) ** float(p)  # noqa: E731
    v = PiecewiseConstantField((1.0, 0.0), (fraction, 1.0 - fraction), omega)
    target = eval_double_integral(Wsc, v)
    res = minimize_two_regions(W, (fraction, 1.0 - fraction), (1.0, 0.0), n_pieces, value_grid,
                               refine_rounds=refine_rounds, omega=omega, seeds=seeds)
    N = n_pieces
    x1, x0 = res.values[:N], res.values[N:]
    w1, w0 = res.weights[:N], res.weights[N:]
    field_ = PiecewiseConstantField(tuple(res.values), tuple(res.weights), omega)
    s = omega ** 2
    same = (s * _block(W, x1, w1, x1, w1), s * _block(W, x0, w0, x0, w0))
    cross = s * _block(W, x1, w1, x0, w0)
    return GapReport(fraction, N, float(p), target, eval_double_integral(W, field_), same, cross,
                     field_, res.exhaustive, res.swept)


def gap_scan(fraction: float = 0.5, ns: Sequence[int] = range(1, 7), p: float = 1.0, **kw) -> list[GapReport]:
    """gap_experiment_diamond_boundary for each N, seeded with divisor solutions."""
    out: list[GapReport] = []
    for N in ns:
        seeds = []
        for r in out:
            if N % r.pieces == 0:
                k = N // r.pieces
                vals = np.asarray(r.field.values)
                seeds.append(np.concatenate([np.repeat(vals[:r.pieces], k), np.repeat(vals[r.pieces:], k)]))
        out.append(gap_experiment_diamond_boundary(fraction, N, p, seeds=seeds, **kw))
    return out


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------

def _envelopes(sc):
    W = sc.W
    W_sc = separately_convex_envelope(W)
    W_co = convex_envelope(W)
    return W, W_sc, W_co


def verify_four_well(p: float = 2.0, q=1.0, grid: ScalarGrid | None = None, ns: Sequence[int] = range(1, 7),
                     value_grid: ScalarGrid | None = None) -> VerifyReport:
    """Minima gap, envelope agreement off the square, vanishing on the cross, discrete minima."""
    sc = preset("four-well", p, q, grid)
    W, W_sc, W_co = _envelopes(sc)
    tol = default_tol(W)
    rep = VerifyReport("four-well", converged=bool(W_sc.meta["converged"]))
    x = sc.grid.points

    lo, hi = min_bounds(W, sc.omega)
    rep.add("(i) minima", lo == 0.0 and hi == 1.0, min_W=lo, min_W_hat=hi)

    # W_hat against the shifted box form dist_inf^p(., [-1, 1]^2) + 1: equal on the
    # square, may differ off it; the differing region is reported, not asserted
    H = diagonalize_function(W).values
    out = np.maximum(np.abs(x) - 1.0, 0.0)
    box_form = np.maximum(out[:, None], out[None, :]) ** p + 1.0
    square = (np.abs(x)[:, None] <= 1.0) & (np.abs(x)[None, :] <= 1.0)
    diff = np.abs(H - box_form)
    differs = diff > tol
    rep.add("W_hat = dist_inf^p(., [-1,1]^2) + 1 on the square", float(diff[square].max()) <= tol,
            err_on_square=float(diff[square].max()), differing_cells=int(differs.sum()),
            max_difference=float(diff.max()),
            differing_bbox=[float(x[differs.any(1)].min()), float(x[differs.any(1)].max())] if differs.any() else [])

    outside = np.maximum(np.abs(x)[:, None], np.abs(x)[None, :]) >= 1.0 - 1e-9 * sc.grid.h
    keep = outside & ~boundary_tainted(sc.grid)
    e_sc, e_co = _sup(W, W_sc, keep), _sup(W, W_co, keep)
    rep.add("(ii) W = W_sc = W_co outside the open square", e_sc <= tol and e_co <= tol,
            err_sc=e_sc, err_co=e_co, tol=tol)

    on_axis = np.isclose(x, 0.0, atol=1e-9 * sc.grid.h)
    in_unit = np.abs(x) <= 1.0 + 1e-9 * sc.grid.h
    cross = (on_axis[:, None] & in_unit[None, :]) | (in_unit[:, None] & on_axis[None, :])
    m = float(W_sc.values[cross].max())
    rep.add("(iii) W_sc vanishes on the cross", m <= tol, max_on_cross=m, tol=tol)

    vg = value_grid or ScalarGrid(-2.0, 2.0, 81)
    reports = minimize_scan(sc.rule, list(ns), vg, omega=sc.omega)
    best = [r.best_value for r in reports]
    delta0 = min(best)
    mono = all(b <= a + 1e-12 for a, b in zip(best, best[1:]))
    sandwich = all(r.lower_bound < r.best_value <= r.upper_bound + tol for r in reports)
    sc_min = minimize_discrete(W_sc, 1, sc.grid, omega=sc.omega)
    zero_at_0 = sc_min.best_value <= tol and sc_min.best_field.values == (0.0,)
    rep.add("(iv) discrete minima stay above delta0 > 0; W_sc attains 0 at u = 0",
            mono and delta0 > 0 and sandwich and zero_at_0,
            minima=best, delta0=delta0, non_increasing=mono, sandwich=sandwich,
            fields=[list(r.best_field.values) for r in reports],
            sc_minimum=sc_min.best_value, sc_field=list(sc_min.best_field.values))
    mh = check_minhat_condition(W, tol, W_sc)
    rep.add("minhat condition fails", mh.verdict == FAILS, **mh.to_dict())
    return rep


def verify_diamond_boundary(p: float = 2.0, fraction: float = 0.5, max_pieces: int = 3,
                            gap_ps: Sequence[float] = (1.0, 2.0), grid: ScalarGrid | None = None) -> VerifyReport:
    sc = preset("diamond-boundary", p, 1, grid)
    W, W_sc, W_co = _envelopes(sc)
    tol = default_tol(W)
    g = sc.grid
    rep = VerifyReport("diamond-boundary", converged=bool(W_sc.meta["converged"]))
    K = sc.K_grid
    half = [(a, b) for a in (-0.5, 0.5) for b in (-0.5, 0.5)]
    rep.add("K_hat = {-1/2, 1/2}^2", diagonalize_set(K) == GridSet.from_points(g, half), size=len(diagonalize_set(K)))
    rep.add("K_sc = K_co", separately_convex_hull_set(K) == convex_hull_set(K))
    keep = ~boundary_tainted(g)
    e = _sup(W_sc, W_co, keep)
    rep.add("W_sc = W_co", e <= 2 * tol, err=e, tol=tol)
    lo, hi = min_bounds(W, sc.omega)
    rep.add("min W = min W_hat = 0", abs(lo) <= tol and abs(hi) <= tol, min_W=lo, min_W_hat=hi)
    box = _square_mask(g, -0.5, 0.5)
    ness = check_ness_condition(W, tol=tol, W_sc=W_sc)
    rep.add("ness condition holds", ness.verdict == HOLDS and ness.lhs == box and ness.pieces_agree,
            **ness.to_dict())
    rep.add("K_rlx = [-1/2, 1/2]^2", relaxed_cartesian_union(K) == box)
    gaps = []
    ok = True
    for gp in gap_ps:
        for r in gap_scan(fraction, range(1, max_pieces + 1), gp):
            gaps.append(r.to_dict())
            ok &= r.delta > 0 and r.decomposition_error <= 1e-12
            if r.pieces == 1 and gp == 1.0 and fraction == 0.5:
                ok &= r.minimum == 0.5
    target = fraction ** 2
    rep.add("gap above target", ok and all(gr["target"] == target for gr in gaps),
            target=target, runs=gaps, delta=min(gr["delta"] for gr in gaps))
    return rep


def verify_five_point(p: float = 2.0, grid: ScalarGrid | None = None) -> VerifyReport:
    sc = preset("five-point", p, 1, grid)
    W, W_sc, W_co = _envelopes(sc)
    tol = default_tol(W)
    g = sc.grid
    rep = VerifyReport("five-point", converged=bool(W_sc.meta["converged"]))
    K = sc.K_grid
    corner = GridSet.from_points(g, [(2.0, 2.0)])
    rep.add("K_hat = {(2, 2)}", diagonalize_set(K) == corner)
    pieces = maximal_cartesian_subsets(K)
    rep.add("single maximal piece {2}", [pc.values(g) for pc in pieces] == [[2.0]],
            pieces=[pc.values(g) for pc in pieces])
    rep.add("K_rlx = {(2, 2)}", relaxed_cartesian_union(K) == corner)
    keep = ~boundary_tainted(g)
    e = _sup(W_co, sc.co_exact(), keep)
    rep.add("convex envelope matches dist^p to K_co", e <= CO_TOL, err=e, bound=CO_TOL)
    mh = check_minhat_condition(W, tol, W_sc)
    rep.add("minhat condition not applicable", mh.verdict == NOT_APPLICABLE, **mh.to_dict())
    ness = check_ness_condition(W, tol=tol, W_sc=W_sc)
    origin = ness.lhs is not None and ness.lhs.contains(0.0, 0.0)
    rep.add("ness condition fails", ness.verdict == FAILS and origin and ness.rhs == corner,
            lhs_contains_origin=origin, differing=len(ness.differing_points()), **ness.to_dict())
    r2 = check_relaxed_inclusion(PiecewiseConstantField.constant(2.0), K)
    r0 = check_relaxed_inclusion(PiecewiseConstantField.constant(0.0), K)
    rep.add("relaxed inclusion: u = 2 holds, u = 0 fails",
            r2.holds and r2.piece.values(g) == [2.0] and not r0.holds)
    return rep


def verify_cartesian(A: Sequence[float] = (-1.0, 1.0), p: float = 2.0, q=1.0, n_random: int = 50,
                     js: Sequence[int] = (1, 2, 4, 8), seed: int = 0,
                     grid: ScalarGrid | None = None) -> VerifyReport:
    sc = preset("cartesian", p, q, grid, A=A)
    W, W_sc, W_co = _envelopes(sc)
    tol = default_tol(W)
    g = sc.grid
    lo, hi = min(A), max(A)
    rep = VerifyReport("cartesian", converged=bool(W_sc.meta["converged"]))
    keep = ~boundary_tainted(g)
    exact = W.with_values(np.asarray(CartesianScRule(tuple(A), p, q)(*np.meshgrid(g.points, g.points, indexing="ij"))))
    e1, e2 = _sup(W_sc, exact, keep), _sup(W_sc, W_co, keep)
    rep.add("W_sc matches the closed form", e1 <= 2 * tol, err=e1, tol=tol)
    rep.add("W_sc = W_co", e2 <= 2 * tol, err=e2, tol=tol)
    box = _square_mask(g, lo, hi)
    rep.add("K_rlx = A_co x A_co", relaxed_cartesian_union(sc.K_grid) == box)
    ness = check_ness_condition(W, tol=tol, W_sc=W_sc)
    rep.add("ness condition holds", ness.verdict == HOLDS and ness.lhs == box, **ness.to_dict())
    mh = check_minhat_condition(W, tol, W_sc)
    rep.add("minhat condition not applicable", mh.verdict == NOT_APPLICABLE, **mh.to_dict())
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random):
        v = random_field(rng, lo - 1.0, hi + 1.0)
        for j in js:
            r = recovery_sequence_cartesian(v, A, p, q, j)
            worst = max(worst, r.error / (1.0 + abs(r.target)))
    rep.add("recovery identity", worst <= 1e-12, worst_relative_error=worst, samples=n_random, js=list(js))
    return rep


def random_field(rng: np.random.Generator, lo: float, hi: float, max_pieces: int = 5,
                 values: Sequence[float] | None = None) -> PiecewiseConstantField:
    """Random simple field; values uniform in [lo, hi] or drawn from ``values``."""
    k = int(rng.integers(1, max_pieces + 1))
    if values is None:
        vals = rng.uniform(lo, hi, size=k)
    else:
        vals = rng.choice(np.asarray(values), size=k)
    w = rng.uniform(0.1, 1.0, size=k)
    fr = w / w.sum()
    fr[-1] = 1.0 - math.fsum(fr[:-1].tolist())
    return PiecewiseConstantField(tuple(float(a) for a in vals), tuple(float(f) for f in fr))


def _indicator_samples(K: GridSet, rng, count: int) -> list[PiecewiseConstantField]:
    g = K.grid
    x = g.points
    inner = x[np.abs(x) <= 2.5 + 1e-9]
    pieces = maximal_cartesian_subsets(K)
    out = []
    for k in range(count):
        if pieces and k % 2 == 0:
            pc = pieces[int(rng.integers(len(pieces)))]
            a, b = x[pc.lo], x[pc.hi]
            if rng.random() < 0.5:
                out.append(random_field(rng, a, b))
            else:
                out.append(random_field(rng, a, b, values=x[pc.lo:pc.hi + 1]))
        else:
            out.append(random_field(rng, 0, 0, values=inner))
    return out


def verify_indicator(n_random: int = 100, seed: int = 0, grid: ScalarGrid | None = None) -> VerifyReport:
    """Relaxed indicator against the indicator of K_rlx, per example set."""
    rep = VerifyReport("indicator")
    g = grid or default_grid()
    rng = np.random.default_rng(seed)
    for name in ("four-well", "five-point", "diamond-boundary", "cartesian"):
        sc = preset(name, grid=g)
        K = sc.K_grid
        K_rlx = relaxed_cartesian_union(K)
        fields = _indicator_samples(K, rng, n_random)
        agree = finite = 0
        for u in fields:
            a = eval_relaxed_indicator(K, u)
            b = eval_indicator(K_rlx, u)
            agree += a.finite == b.finite
            finite += a.finite
        rep.add(f"{name}: relaxed indicator = indicator of K_rlx", agree == len(fields),
                agree=agree, total=len(fields), finite=finite)
        hull = separately_convex_hull_set(diagonalize_set(K))
        rep.add(f"{name}: K_rlx = sc-hull of K_hat", K_rlx == hull, size_rlx=len(K_rlx), size_hull=len(hull))
        if name == "four-well":
            inf_all = all(eval_indicator(sc.K, u).is_infinite for u in fields)
            rep.add("four-well: indicator is infinite", inf_all)
        if name == "diamond-boundary":
            rep.add("diamond-boundary: K_rlx = [-1/2, 1/2]^2", K_rlx == _square_mask(g, -0.5, 0.5))
    return rep


VERIFIERS = {
    "four-well": verify_four_well,
    "diamond-boundary": verify_diamond_boundary,
    "five-point": verify_five_point,
    "cartesian": verify_cartesian,
    "indicator": verify_indicator,
}

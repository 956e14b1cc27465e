import itertools
import math

import numpy as np
import pytest

from nonlocal_relax.envelopes import separately_convex_envelope
from nonlocal_relax.functionals import eval_double_integral
from nonlocal_relax.grid import GridFunction, PiecewiseConstantField, ScalarGrid
from nonlocal_relax.minimize import (min_bounds, minimize_discrete, minimize_scan,
                                     minimize_two_regions, region_candidates, sorted_tuples)
from nonlocal_relax.rules import DistanceRule, l1_sphere, well_set
from nonlocal_relax.scenario import preset

FOUR = [(1, 0), (-1, 0), (0, 1), (0, -1)]
W4 = DistanceRule(well_set(FOUR), 2, 1)
VG = ScalarGrid(-2, 2, 41)


def brute_min(W, N, vg):
    """Exhaustive search over all ordered N-tuples of grid values."""
    best = math.inf
    for t in itertools.product(vg.points, repeat=N):
        best = min(best, eval_double_integral(W, PiecewiseConstantField.equal_pieces(t)))
    return best


def test_sorted_tuples_lexicographic():
    for m, N in ((5, 1), (4, 3), (6, 2)):
        assert sorted_tuples(m, N).tolist() == [list(c) for c in
                                                itertools.combinations_with_replacement(range(m), N)]


def test_region_candidates_respect_sum():
    T, s = region_candidates(10, 3, np.array([12]), 10_000, True)
    assert s == 1 and np.all(T.sum(axis=1) == 12) and np.all(np.diff(T, axis=1) >= 0)
    ref = [c for c in itertools.combinations_with_replacement(range(10), 3) if sum(c) == 12]
    assert sorted(map(tuple, T.tolist())) == ref


def test_four_well_n1_and_n2():
    r1 = minimize_discrete(W4, 1, VG)
    # W(t, t) = 1 on [-1, 1]; ties resolve toward the smallest value
    assert r1.best_value == 1.0 == W4(0.0, 0.0)
    assert r1.best_field.values == (-1.0,)
    r2 = minimize_discrete(W4, 2, VG, refine_rounds=0)
    assert r2.best_value <= 0.5
    assert r2.best_value == pytest.approx(brute_min(W4, 2, ScalarGrid(-2, 2, 41)), abs=1e-15)
    assert r2.exhaustive


def test_n3_matches_brute_oracle():
    vg = ScalarGrid(-2, 2, 17)
    r = minimize_discrete(W4, 3, vg, refine_rounds=0)
    assert r.best_value == pytest.approx(brute_min(W4, 3, vg), abs=1e-15)


def test_sc_envelope_minimum_is_zero(small_grid):
    S = separately_convex_envelope(preset("four-well", grid=small_grid).W)
    for N in (1, 2, 4):
        r = minimize_discrete(S, N, small_grid, refine_rounds=1)
        assert r.best_value == 0.0
    assert minimize_discrete(S, 1, small_grid).best_field.values == (0.0,)


def test_bounds():
    g = ScalarGrid(-1, 1, 5)
    assert min_bounds(GridFunction(g, np.full((5, 5), 2.5), True)) == (2.5, 2.5)
    assert min_bounds(preset("four-well", grid=ScalarGrid(-3, 3, 61)).W) == (0.0, 1.0)
    assert min_bounds(preset("diamond-boundary", grid=ScalarGrid(-3, 3, 61)).W) == (0.0, 0.0)


def test_monotone_in_n_and_sandwich():
    reps = minimize_scan(W4, range(1, 7), VG)
    vals = [r.best_value for r in reps]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(r.lower_bound < r.best_value <= r.upper_bound + 1e-9 for r in reps)
    assert vals[:3] == pytest.approx([1.0, 0.5, 4 / 9], abs=1e-15)


def test_mean_constraint():
    r = minimize_discrete(W4, 3, VG, mean_constraint=0.3)
    assert abs(r.best_field.mean() - 0.3) <= VG.h / 2 + 1e-12
    r4 = minimize_discrete(W4, 4, VG, mean_constraint=0.0, refine_rounds=2)
    assert abs(r4.best_field.mean()) <= VG.h / 2 + 1e-12
    with pytest.raises(ValueError):
        minimize_discrete(W4, 2, VG, mean_constraint=5.0)
    with pytest.raises(ValueError):
        minimize_discrete(W4, 0, VG)


def test_determinism():
    a = minimize_discrete(W4, 4, VG)
    b = minimize_discrete(W4, 4, VG)
    assert a.to_dict() == b.to_dict()


def test_two_regions_single_piece_is_forced():
    W = DistanceRule(l1_sphere(1), 1, 1)
    res = minimize_two_regions(W, (0.5, 0.5), (1.0, 0.0), 1, ScalarGrid(-2, 3, 101))
    assert res.energy == 0.5 and list(res.values) == [1.0, 0.0]
    with pytest.raises(ValueError):
        minimize_two_regions(W, (0.5, 0.5), (1.01, 0.0), 1, ScalarGrid(-2, 3, 101))


def test_two_regions_keep_exact_means():
    W = DistanceRule(l1_sphere(1), 2, 1)
    res = minimize_two_regions(W, (0.5, 0.5), (1.0, 0.0), 4, ScalarGrid(-2, 3, 51), refine_rounds=2)
    assert np.mean(res.values[:4]) == pytest.approx(1.0, abs=1e-12)
    assert np.mean(res.values[4:]) == pytest.approx(0.0, abs=1e-12)

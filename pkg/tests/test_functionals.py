import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_relax.functionals import (check_exact_inclusion, check_relaxed_inclusion,
                                        eval_double_integral, eval_indicator, eval_relaxed_indicator)
from nonlocal_relax.grid import GridFunction, PiecewiseConstantField, ScalarGrid
from nonlocal_relax.rules import CartesianScRule, DistanceRule, cartesian_square, l1_sphere, well_set
from nonlocal_relax.sets import relaxed_cartesian_union

FOUR = [(1, 0), (-1, 0), (0, 1), (0, -1)]
W4 = DistanceRule(well_set(FOUR), 2, 1)


def test_constant_and_two_piece():
    assert eval_double_integral(W4, PiecewiseConstantField.constant(0.0, 2.0)) == 4.0
    xi, zeta = 0.3, -1.7
    u = PiecewiseConstantField((xi, zeta), (0.5, 0.5))
    ref = W4(xi, xi) / 4 + W4(zeta, zeta) / 4 + W4(xi, zeta) / 2
    assert eval_double_integral(W4, u) == pytest.approx(ref, rel=1e-15)


def test_two_valued_target_on_sc_envelope():
    D = l1_sphere(1)
    from nonlocal_relax.rules import ConvexRegion
    R = ConvexRegion.hull_of(D)
    for f in (0.25, 0.5, 0.7):
        v = PiecewiseConstantField((1.0, 0.0), (f, 1 - f))
        assert eval_double_integral(lambda x, y: R.distance(x, y, 1) ** 2, v) == pytest.approx(f * f, abs=1e-15)


def test_grid_function_rejects_outside_values():
    g = ScalarGrid(-1, 1, 5)
    W = GridFunction(g, np.zeros((5, 5)), True)
    with pytest.raises(ValueError, match="2.5"):
        eval_double_integral(W, PiecewiseConstantField.constant(2.5))


values = st.lists(st.sampled_from([-1.5, -1.0, -0.25, 0.0, 0.5, 1.0, 2.0]), min_size=1, max_size=6)


@settings(max_examples=80, deadline=None)
@given(values, st.randoms(use_true_random=False))
def test_permutation_and_merge_invariance(vals, rnd):
    n = len(vals)
    fr = [1.0 / n] * n
    u = PiecewiseConstantField(tuple(vals), tuple(fr))
    perm = list(range(n))
    rnd.shuffle(perm)
    v = PiecewiseConstantField(tuple(vals[i] for i in perm), tuple(fr[i] for i in perm))
    assert eval_double_integral(W4, u) == eval_double_integral(W4, v)
    dist = u.distribution()
    merged = PiecewiseConstantField(dist[0], dist[1])
    assert eval_double_integral(W4, u) == eval_double_integral(W4, merged)


@settings(max_examples=50, deadline=None)
@given(values)
def test_monotone_comparison(vals):
    u = PiecewiseConstantField.equal_pieces(vals)
    sc = CartesianScRule((-1.0, 1.0), 2, 1)
    W = DistanceRule(cartesian_square([-1, 1]), 2, 1)
    assert eval_double_integral(sc, u) <= eval_double_integral(W, u) + 1e-15


def test_indicator_examples(grid):
    A = cartesian_square([-1, 1])
    u = PiecewiseConstantField((1.0, -1.0), (0.3, 0.7))
    assert eval_indicator(A, u).value == 0.0 and check_exact_inclusion(u, A).holds
    bad = eval_indicator(well_set(FOUR), u)
    assert bad.is_infinite and bad.value == math.inf and bad.failures
    assert not check_exact_inclusion(PiecewiseConstantField.constant(0.0), well_set(FOUR))
    half = PiecewiseConstantField((0.5, -0.5), (0.5, 0.5))
    assert eval_indicator(l1_sphere(1), half).value == 0.0
    res = check_exact_inclusion(PiecewiseConstantField.constant(1.0), l1_sphere(1))
    assert not res.holds and res.witness == (1.0, 1.0)
    # grid sets and callables behave alike
    assert eval_indicator(l1_sphere(1).grid_trace(grid), half).value == 0.0
    assert eval_indicator(lambda a, b: abs(a) + abs(b) == 1, half).value == 0.0


def test_relaxed_inclusion_examples(grid):
    D = l1_sphere(1).grid_trace(grid)
    u = PiecewiseConstantField((0.1, -0.5, 0.5, 0.33), (0.25, 0.25, 0.25, 0.25))
    r = check_relaxed_inclusion(u, D)
    assert r.holds and r.piece.values(grid) == [-0.5, 0.5] and r.interval == (-0.5, 0.5)
    assert eval_relaxed_indicator(D, u).value == 0.0
    assert not check_relaxed_inclusion(PiecewiseConstantField.constant(0.6), D)
    four = well_set(FOUR).grid_trace(grid)
    assert eval_relaxed_indicator(four, PiecewiseConstantField.constant(0.0)).is_infinite
    five = well_set(FOUR + [(2, 2)]).grid_trace(grid)
    r2 = check_relaxed_inclusion(PiecewiseConstantField.constant(2.0), five)
    assert r2.holds and r2.piece.values(grid) == [2.0]
    assert not check_relaxed_inclusion(PiecewiseConstantField.constant(0.0), five)
    assert eval_relaxed_indicator(five, PiecewiseConstantField.constant(0.0)).is_infinite


def test_exact_implies_relaxed(grid):
    D = l1_sphere(1).grid_trace(grid)
    from nonlocal_relax.sets import diagonalize_set
    Dh = diagonalize_set(D)
    rng = np.random.default_rng(2)
    for _ in range(50):
        vals = rng.choice([-0.5, 0.5, 0.0, 1.0], size=rng.integers(1, 4))
        u = PiecewiseConstantField.equal_pieces(list(vals))
        if check_exact_inclusion(u, Dh):
            assert check_relaxed_inclusion(u, D)


def test_relaxed_indicator_consistency(grid):
    D = l1_sphere(1).grid_trace(grid)
    R = relaxed_cartesian_union(D)
    rng = np.random.default_rng(5)
    for _ in range(60):
        vals = rng.uniform(-0.8, 0.8, size=rng.integers(1, 5))
        u = PiecewiseConstantField.equal_pieces(list(vals))
        assert eval_relaxed_indicator(D, u).finite == eval_indicator(R, u).finite

from nonlocal_relax.conditions import (FAILS, HOLDS, NOT_APPLICABLE, check_minhat_condition,
                                       check_ness_condition)

from conftest import envelopes


def test_minhat_verdicts(grid):
    _, W, S, _ = envelopes("four-well", 2.0, 1.0, grid)
    v = check_minhat_condition(W, W_sc=S)
    assert v.verdict == FAILS and (v.min_W, v.min_W_hat, v.min_W_sc_hat) == (0.0, 1.0, 0.0)
    for name in ("cartesian", "five-point"):
        _, W, S, _ = envelopes(name, 2.0, 1.0, grid)
        assert check_minhat_condition(W, W_sc=S).verdict == NOT_APPLICABLE


def test_minhat_holds_for_separately_convex_function(small_grid):
    # (xi zeta + 1)^2 is convex in each variable, vanishes off the diagonal and is >= 1 on it
    from nonlocal_relax.grid import sample_function
    W = sample_function(small_grid, lambda x, y: (x * y + 1.0) ** 2)
    v = check_minhat_condition(W)
    assert v.verdict == HOLDS and v.min_W == 0.0 and v.min_W_sc_hat == 1.0


def test_ness_verdicts(grid):
    _, W, S, _ = envelopes("five-point", 2.0, 1.0, grid)
    v = check_ness_condition(W, W_sc=S)
    assert v.verdict == FAILS
    assert v.lhs.contains(0.0, 0.0) and v.rhs.points() == [(2.0, 2.0)]
    assert v.differing_points() == [(0.0, 0.0)]
    for name, r in (("diamond-boundary", 0.5), ("cartesian", 1.0)):
        _, W, S, _ = envelopes(name, 2.0, 1.0, grid)
        v = check_ness_condition(W, W_sc=S)
        assert v.verdict == HOLDS and v.pieces_agree
        pts = v.lhs.points()
        assert min(pts) == (-r, -r) and max(pts) == (r, r)


def test_ness_not_applicable_for_four_well(grid):
    _, W, S, _ = envelopes("four-well", 2.0, 1.0, grid)
    v = check_ness_condition(W, W_sc=S)
    assert v.verdict == NOT_APPLICABLE and v.differing_points() == []

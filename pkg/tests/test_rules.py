import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_relax.rules import (CartesianScRule, ConvexRegion, DistanceRule, PlanarSet,
                                  cartesian_square, l1_sphere, norm2, parse_norm, well_set)


def brute_segment_distance(x, y, a, b, q, samples=20001):
    t = np.linspace(0, 1, samples)
    px = a[0] + t * (b[0] - a[0])
    py = a[1] + t * (b[1] - a[1])
    return float(norm2(x - px, y - py, q).min())


@pytest.mark.parametrize("q", [1.0, 2.0, math.inf, 3.0])
def test_segment_distance_against_sampling(q):
    rng = np.random.default_rng(1)
    S = PlanarSet(segments=(((-1.0, 0.5), (2.0, -1.0)),))
    for x, y in rng.uniform(-3, 3, size=(40, 2)):
        d = float(S.distance(x, y, q))
        assert d == pytest.approx(brute_segment_distance(x, y, (-1, 0.5), (2, -1), q), abs=5e-4)
        assert d <= brute_segment_distance(x, y, (-1, 0.5), (2, -1), q) + 1e-12


def test_parse_norm():
    assert parse_norm("inf") == math.inf and parse_norm(2) == 2.0
    with pytest.raises(ValueError):
        parse_norm(0.5)
    with pytest.raises(ValueError):
        parse_norm("two")


def test_l1_sphere_distances():
    D = l1_sphere(1.0)
    assert D.is_symmetric
    assert float(D.distance(0, 0, 1)) == 1.0
    assert float(D.distance(1, 1, 1)) == 1.0
    assert float(D.distance(0.5, 0.5, 1)) == 0.0
    assert D.contains(0.25, -0.75)


def test_convex_region_zero_inside():
    R = ConvexRegion.hull_of(well_set([(1, 0), (-1, 0), (0, 1), (0, -1)]))
    assert float(R.distance(0.2, 0.3)) == 0.0
    assert float(R.distance(1, 1, 1)) == pytest.approx(1.0)
    seg = ConvexRegion(((0.0, 0.0), (1.0, 0.0)))
    assert float(seg.distance(0.5, 1.0, 2)) == 1.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4), st.sampled_from([1.0, 2.0, math.inf]),
       st.sampled_from([1.0, 2.0]))
def test_cartesian_sc_rule_is_distance_to_square(x, y, q, p):
    rule = CartesianScRule((-1.0, 1.0, 0.25), p, q)
    square = ConvexRegion(((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)))
    assert rule(x, y) == pytest.approx(float(square.distance(x, y, q)) ** p, abs=1e-12)


def test_distance_rule():
    W = DistanceRule(cartesian_square([-1, 1]), 2, 1)
    assert W.symmetric
    assert W(0.0, 0.0) == 4.0 and W(1.0, -1.0) == 0.0
    with pytest.raises(ValueError):
        DistanceRule(cartesian_square([0]), 0.5)
    with pytest.raises(ValueError):
        PlanarSet()

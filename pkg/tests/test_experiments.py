import pytest

from nonlocal_relax.experiments import (gap_experiment_diamond_boundary, gap_scan, verify_cartesian,
                                        verify_five_point, verify_four_well)


def test_gap_single_piece_forced():
    r = gap_experiment_diamond_boundary(0.5, 1, 1.0)
    assert r.target == 0.25 and r.minimum == 0.5 and r.delta == 0.25
    assert r.field.values == (1.0, 0.0)
    assert r.same_region == (0.25, 0.25) and r.cross == 0.0


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_gap_decomposition(p):
    for r in gap_scan(0.5, range(1, 4), p):
        assert r.decomposition_error <= 1e-15
        assert sum(r.same_region) >= 0.25 - 1e-12
        assert r.delta > 0
        assert r.exhaustive


def test_gap_other_fraction():
    r = gap_experiment_diamond_boundary(0.3, 2, 2.0)
    assert r.target == pytest.approx(0.09, abs=1e-16) and r.delta > 0
    with pytest.raises(ValueError):
        gap_experiment_diamond_boundary(1.0, 1)


def test_four_well_report():
    rep = verify_four_well(ns=range(1, 4))
    assert rep.passed
    assert rep["(i) minima"].detail == {"min_W": 0.0, "min_W_hat": 1.0}
    box = rep["W_hat = dist_inf^p(., [-1,1]^2) + 1 on the square"].detail
    assert box["err_on_square"] == 0.0 and box["differing_cells"] > 0


def test_five_point_and_cartesian_reports():
    assert verify_five_point().passed
    assert verify_cartesian(n_random=10).passed

"""Exit criteria at desk-scale resolution.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary. Run alone with ``pytest tests/test_acceptance.py`` or
``python tests/test_acceptance.py``.
"""
import sys

import numpy as np
import pytest

from nonlocal_relax.conditions import (FAILS, HOLDS, check_minhat_condition, check_ness_condition)
from nonlocal_relax.envelopes import convex_envelope, default_tol, diagonalize_function, grid_min
from nonlocal_relax.experiments import gap_scan, random_field, verify_indicator
from nonlocal_relax.grid import GridSet, ScalarGrid, boundary_tainted, default_grid, level_set
from nonlocal_relax.minimize import minimize_discrete, minimize_scan
from nonlocal_relax.scenario import PRESETS, preset
from nonlocal_relax.sequences import recovery_sequence_cartesian
from nonlocal_relax.sets import diagonalize_set, maximal_cartesian_subsets

from conftest import ACCEPTANCE_LINES, envelopes
from oracles import brute_maximal_cartesian, random_symmetric_mask

pytestmark = pytest.mark.acceptance


def record(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c01_four_well_minima():
    rows = []
    for p in (1.0, 2.0):
        W = preset("four-well", p).W
        rows.append((p, grid_min(W)[0], grid_min(diagonalize_function(W))[0]))
    ok = all(m == 0.0 and mh == 1.0 for _, m, mh in rows)
    record(1, "four-well min W = 0, min W_hat = 1", ok,
           "; ".join(f"p={p:g}: {m!r}, {mh!r}" for p, m, mh in rows))


def _co_error(name, p, n):
    g = ScalarGrid(-3.0, 3.0, n)
    sc = preset(name, p, 1, g)
    C = convex_envelope(sc.W)
    keep = ~boundary_tainted(g)
    return float(np.abs(C.values - sc.co_exact().values)[keep].max())


def test_c02_convexification_identity():
    parts, ok = [], True
    for name in ("four-well", "five-point"):
        for p in (1.0, 2.0):
            coarse, fine = _co_error(name, p, 241), _co_error(name, p, 481)
            ok &= coarse <= 0.15 and fine <= max(coarse, 1e-12)
            parts.append(f"{name} p={p:g}: {coarse:.2e} -> {fine:.2e}")
    record(2, "convex envelope = dist^p to K_co within 0.15, non-increasing under refinement", ok,
           "; ".join(parts))


def test_c03_sc_equals_co():
    parts, ok = [], True
    g = default_grid()
    keep = ~boundary_tainted(g)
    for name in ("diamond-boundary", "cartesian"):
        for p in (1.0, 2.0):
            _, W, S, C = envelopes(name, p, 1.0, g)
            tol = default_tol(W)
            e = float(np.abs(S.values - C.values)[keep].max())
            ok &= e <= 2 * tol and S.meta["converged"]
            parts.append(f"{name} p={p:g}: {e:.1e} (2tol={2 * tol:.1e})")
    record(3, "sc envelope = convex envelope within 2 tol", ok, "; ".join(parts))


def test_c04_diagonalization_law():
    rng = np.random.default_rng(4)
    checked, ok = 0, True
    for name in PRESETS:
        for p in (1.0, 2.0):
            W = preset(name, p).W
            H = diagonalize_function(W)
            levels = np.concatenate([[0.0], rng.uniform(W.values.min(), W.values.max(), 19)])
            for c in levels:
                ok &= level_set(H, c) == diagonalize_set(level_set(W, c))
                checked += 1
    record(4, "level sets of W_hat = diagonalized level sets of W", ok, f"{checked} level sets, exact")


def test_c05_clique_oracle():
    rng = np.random.default_rng(5)
    ok, total = True, 0
    for k in range(200):
        n = int(rng.integers(2, 16))
        m = random_symmetric_mask(rng, n, rng.uniform(0.2, 0.8))
        E = GridSet.from_mask(ScalarGrid(0.0, 1.0, n), m)
        pieces = maximal_cartesian_subsets(E)
        ok &= [list(pc.members) for pc in pieces] == brute_maximal_cartesian(m)
        union = np.zeros_like(m)
        for pc in pieces:
            union[np.ix_(pc.members, pc.members)] = True
        ok &= bool(np.array_equal(union, diagonalize_set(E).mask))
        total += len(pieces)
    record(5, "maximal Cartesian pieces match brute force; union = diagonalization", ok,
           f"200 masks, {total} pieces")


def test_c06_condition_verdicts():
    g = default_grid()
    _, W, S, _ = envelopes("four-well", 2.0, 1.0, g)
    mh = check_minhat_condition(W, W_sc=S).verdict
    verdicts = {"four-well minhat": mh}
    for name in ("five-point", "diamond-boundary", "cartesian"):
        _, W, S, _ = envelopes(name, 2.0, 1.0, g)
        verdicts[f"{name} ness"] = check_ness_condition(W, W_sc=S).verdict
    expected = {"four-well minhat": FAILS, "five-point ness": FAILS,
                "diamond-boundary ness": HOLDS, "cartesian ness": HOLDS}
    record(6, "necessary-condition verdicts", verdicts == expected,
           ", ".join(f"{k}: {v}" for k, v in verdicts.items()))


def test_c07_recovery_identity():
    rng = np.random.default_rng(7)
    A = (-1.0, 1.0)
    worst = 0.0
    for _ in range(50):
        v = random_field(rng, -3.0, 3.0)
        p = float(rng.choice([1.0, 2.0]))
        for j in (1, 2, 4, 8):
            r = recovery_sequence_cartesian(v, A, p, 1, j)
            worst = max(worst, r.error / (1.0 + abs(r.target)))
    record(7, "recovery field energy = I_{W_sc}(v)", worst <= 1e-12, f"worst scaled error {worst:.1e}")


def test_c08_gap():
    parts, ok = [], True
    for p in (1.0, 2.0):
        reps = gap_scan(0.5, range(1, 7), p)
        for r in reps:
            ok &= r.target == 0.25 and r.delta > 0 and r.decomposition_error <= 1e-12
            ok &= sum(r.same_region) >= 0.25 - 1e-12
        if p == 1.0:
            ok &= reps[0].minimum == 0.5
        parts.append(f"p={p:g}: minima " + ", ".join(f"{r.minimum:.4f}" for r in reps)
                     + f", delta >= {min(r.delta for r in reps):.4f}")
    record(8, "two-region minimum exceeds target 0.25 by delta > 0 for N = 1..6", ok, "; ".join(parts))


def test_c09_sandwich():
    vg = ScalarGrid(-2.5, 2.5, 101)
    ok, parts = True, []
    for name in PRESETS:
        sc = preset(name, 2.0)
        ns = range(1, 7) if name == "four-well" else range(1, 4)
        reps = minimize_scan(sc.rule, ns, vg)
        tol = 1e-9
        ok &= all(r.lower_bound <= r.best_value <= r.upper_bound + tol for r in reps)
        if name == "four-well":
            vals = [r.best_value for r in reps]
            delta0 = min(vals)
            ok &= delta0 > 0 and all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
            parts.append(f"four-well delta0={delta0:.4f}")
    _, W, S, _ = envelopes("four-well", 2.0, 1.0, default_grid())
    z = minimize_discrete(S, 1, default_grid())
    ok &= z.best_value == 0.0 and z.best_field.values == (0.0,)
    parts.append(f"W_sc minimum {z.best_value} at u = {z.best_field.values[0]}")
    record(9, "lower <= discrete minimum <= upper + tol", ok, "; ".join(parts))


def test_c10_indicator_relaxation():
    rep = verify_indicator(n_random=100, seed=10)
    consistency = [f for f in rep.findings if "relaxed indicator" in f.name]
    box = rep["diamond-boundary: K_rlx = [-1/2, 1/2]^2"].passed
    ok = all(f.passed for f in consistency) and len(consistency) == 4 and box
    record(10, "relaxed indicator = indicator of K_rlx; diamond K_rlx = [-1/2, 1/2]^2", ok,
           ", ".join(f"{f.name.split(':')[0]} {f.detail['agree']}/{f.detail['total']}" for f in consistency))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

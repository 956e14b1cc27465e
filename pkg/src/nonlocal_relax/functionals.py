"""Double-integral and indicator functionals on piecewise-constant fields."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .grid import CartesianPiece, GridFunction, GridSet, PiecewiseConstantField, interpolate
from .rules import PlanarSet
from .sets import maximal_cartesian_subsets, relaxed_cartesian_union

PairRule = Union[GridFunction, Callable]
SetRule = Union[GridSet, PlanarSet, Callable]

_VALUE_ATOL = 1e-12


def pair_values(W: PairRule, xi, zeta):
    """Evaluate W on paired value arrays; grid functions are interpolated."""
    if isinstance(W, GridFunction):
        return interpolate(W, xi, zeta)
    return np.asarray(W(np.asarray(xi, dtype=float), np.asarray(zeta, dtype=float)), dtype=float)


def eval_double_integral(W: PairRule, u: PiecewiseConstantField) -> float:
    """|Omega|^2 * sum_ij lambda_i lambda_j W(xi_i, xi_j).

    Pieces are first merged by value and sorted, and W is evaluated on the
    ordered pair (smaller value first); the sum is correctly rounded by
    ``math.fsum``. Permuting pieces or merging equal-valued pieces therefore
    returns the identical float.
    """
    vals, fr = u.distribution()
    v = np.array(vals)
    lam = np.array(fr)
    a, b = np.triu_indices(len(v))
    w = pair_values(W, v[a], v[b])
    if not np.all(np.isfinite(w)):
        raise ValueError("integrand is not finite on the field's value pairs")
    mult = np.where(a == b, 1.0, 2.0)
    terms = mult * (lam[a] * lam[b]) * w
    return u.omega_measure ** 2 * math.fsum(terms.tolist())


def _member(K: SetRule, xi: float, zeta: float) -> bool:
    if isinstance(K, GridSet):
        return K.contains(xi, zeta)
    if isinstance(K, PlanarSet):
        return bool(K.contains(xi, zeta, _VALUE_ATOL))
    return bool(K(xi, zeta))


@dataclass(frozen=True)
class InclusionResult:
    holds: bool
    witness: tuple[float, float] | None = None
    failures: tuple[tuple[float, float], ...] = ()

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class IndicatorValue:
    """0 or the infinite marker; failing pairs are attached to the latter."""

    finite: bool
    failures: tuple[tuple[float, float], ...] = field(default=())

    @property
    def value(self) -> float:
        return 0.0 if self.finite else math.inf

    @property
    def is_infinite(self) -> bool:
        return not self.finite

    def __repr__(self):
        return "IndicatorValue(0)" if self.finite else f"IndicatorValue(inf, {len(self.failures)} failing pairs)"


def check_exact_inclusion(u: PiecewiseConstantField, K: SetRule) -> InclusionResult:
    """Is (u(x), u(y)) in K for all x, y? Returns the first violating pair."""
    vals = sorted(set(u.values))
    failures = []
    for i, a in enumerate(vals):
        for b in vals[i:]:
            if not _member(K, a, b):
                failures.append((a, b))
            elif a != b and not _member(K, b, a):
                failures.append((b, a))
    if failures:
        return InclusionResult(False, failures[0], tuple(failures))
    return InclusionResult(True)


def eval_indicator(K: SetRule, u: PiecewiseConstantField) -> IndicatorValue:
    res = check_exact_inclusion(u, K)
    return IndicatorValue(res.holds, res.failures)


@dataclass(frozen=True)
class RelaxedInclusion:
    holds: bool
    piece: CartesianPiece | None = None
    interval: tuple[float, float] | None = None

    def __bool__(self):
        return self.holds


def check_relaxed_inclusion(u: PiecewiseConstantField, K: GridSet) -> RelaxedInclusion:
    """Is every value of u inside [min A, max A] for one maximal piece A of K?"""
    x = K.grid.points
    lo, hi = min(u.values), max(u.values)
    for piece in maximal_cartesian_subsets(K):
        a, b = float(x[piece.lo]), float(x[piece.hi])
        if a - _VALUE_ATOL <= lo and hi <= b + _VALUE_ATOL:
            return RelaxedInclusion(True, piece, (a, b))
    return RelaxedInclusion(False)


def eval_relaxed_indicator(K: GridSet, u: PiecewiseConstantField) -> IndicatorValue:
    res = check_relaxed_inclusion(u, K)
    if res.holds:
        return IndicatorValue(True)
    return IndicatorValue(False, check_exact_inclusion(u, relaxed_cartesian_union(K)).failures)

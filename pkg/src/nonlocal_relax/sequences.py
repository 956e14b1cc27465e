"""Oscillating sequences: zig-zag splits and the Cartesian recovery construction."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from .functionals import eval_double_integral
from .grid import PiecewiseConstantField
from .rules import CartesianScRule, DistanceRule, cartesian_square

_ATOL = 1e-12


def _member(value: float, A: Sequence[float]) -> float | None:
    """The element of A within _ATOL of value, if any."""
    k = bisect.bisect_left(A, value - _ATOL)
    if k < len(A) and abs(A[k] - value) <= _ATOL:
        return A[k]
    return None


def _in(value: float, A: Sequence[float]) -> bool:
    return _member(value, A) is not None


def _split(value: float, lam: float, A: Sequence[float], j: int) -> list[tuple[float, float]]:
    """2j alternating sub-pieces (a, b, a, b, ...) averaging to ``value``."""
    k = bisect.bisect_right(A, value)
    a, b = A[k - 1], A[k]
    theta = (b - value) / (b - a)          # weight on a
    wa, wb = lam * theta / j, lam * (1.0 - theta) / j
    out = []
    for _ in range(j):
        out.append((a, wa))
        out.append((b, wb))
    return out


def zigzag_sequence(target: PiecewiseConstantField, A: Sequence[float], j: int) -> PiecewiseConstantField:
    """Replace every target piece by 2j sub-pieces alternating between bracketing values of A.

    Pieces whose value already lies in A are kept (snapped to the exact
    element when within 1e-12). The sub-fractions carry the
    convex weights, so each block still averages to its original value.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    A = sorted(set(float(a) for a in A))
    if not A:
        raise ValueError("A must be nonempty")
    vals, fr = [], []
    for v, lam in zip(target.values, target.fractions):
        a = _member(v, A)
        if a is not None:
            vals.append(a)
            fr.append(lam)
            continue
        if not A[0] < v < A[-1]:
            raise ValueError(f"value {v!r} lies outside the hull [{A[0]}, {A[-1]}]")
        for a, w in _split(v, lam, A, j):
            if w > 0:
                vals.append(a)
                fr.append(w)
    return PiecewiseConstantField(tuple(vals), tuple(fr), target.omega_measure)


def block_means(target: PiecewiseConstantField, A: Sequence[float], j: int) -> list[float]:
    """Weighted mean of each block of zigzag_sequence(target, A, j), in target order."""
    A = sorted(set(float(a) for a in A))
    out = []
    for v, lam in zip(target.values, target.fractions):
        if _in(v, A):
            out.append(v)
            continue
        parts = _split(v, lam, A, j)
        out.append(math.fsum(a * w for a, w in parts) / math.fsum(w for _, w in parts))
    return out


@dataclass(frozen=True)
class RecoveryResult:
    field: PiecewiseConstantField
    value: float
    target: float

    @property
    def error(self) -> float:
        return abs(self.value - self.target)


def recovery_sequence_cartesian(v: PiecewiseConstantField, A: Sequence[float], p: float = 2.0,
                                q=1.0, j: int = 1) -> RecoveryResult:
    """Oscillate the pieces of v inside [min A, max A] between values of A.

    Returns the field, I_W of it for W = dist_q^p(., A x A), and the target
    I_{W^sc}(v) evaluated with the closed-form envelope.
    """
    A = sorted(set(float(a) for a in A))
    if not A:
        raise ValueError("A must be nonempty")
    lo, hi = A[0], A[-1]
    inside = [lo - _ATOL <= x <= hi + _ATOL for x in v.values]
    vals, fr = [], []
    for x, lam, ins in zip(v.values, v.fractions, inside):
        if ins and not _in(x, A):
            for a, w in _split(x, lam, A, j):
                if w > 0:
                    vals.append(a)
                    fr.append(w)
        else:
            vals.append(x)
            fr.append(lam)
    field = PiecewiseConstantField(tuple(vals), tuple(fr), v.omega_measure)
    W = DistanceRule(cartesian_square(A), p, q)
    value = eval_double_integral(W, field)
    target = eval_double_integral(CartesianScRule(tuple(A), p, q), v)
    return RecoveryResult(field, value, target)

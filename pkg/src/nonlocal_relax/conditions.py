"""Necessary conditions for a double integral to be its own relaxation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .envelopes import default_tol, diagonalize_function, grid_min, separately_convex_envelope
from .grid import GridFunction, GridSet, level_set
from .sets import diagonalize_set, relaxed_cartesian_union, separately_convex_hull_set

FAILS = "fails"
HOLDS = "holds"
NOT_APPLICABLE = "not applicable"


@dataclass
class MinhatVerdict:
    verdict: str
    min_W: float
    min_W_hat: float
    min_W_sc: float
    min_W_sc_hat: float
    tol: float
    converged: bool = True

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("verdict", "min_W", "min_W_hat", "min_W_sc", "min_W_sc_hat", "tol", "converged")}


def check_minhat_condition(W: GridFunction, tol: float | None = None,
                           W_sc: GridFunction | None = None) -> MinhatVerdict:
    """Compare min of the diagonalized sc-envelope with min W.

    When min W_hat > min W, a double integral equal to the relaxation must keep
    min (W_sc)^ above min W. The verdict is "fails" if it does not, "holds" if
    it does, and "not applicable" when min W_hat = min W.
    """
    if tol is None:
        tol = default_tol(W)
    if W_sc is None:
        W_sc = separately_convex_envelope(W)
    mW = grid_min(W)[0]
    mWh = grid_min(diagonalize_function(W))[0]
    mS = grid_min(W_sc)[0]
    mSh = grid_min(diagonalize_function(W_sc))[0]
    if mWh <= mW + tol:
        verdict = NOT_APPLICABLE
    elif mSh <= mW + tol:
        verdict = FAILS
    else:
        verdict = HOLDS
    return MinhatVerdict(verdict, mW, mWh, mS, mSh, tol, bool(W_sc.meta.get("converged", True)))


@dataclass
class NessVerdict:
    verdict: str
    lhs: GridSet | None = None
    rhs: GridSet | None = None
    rhs_pieces: GridSet | None = None
    level_eps: float = 0.0
    converged: bool = True
    reason: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def differing(self) -> np.ndarray:
        """Cells in exactly one of the two sides."""
        if self.lhs is None:
            return np.zeros((0, 0), dtype=bool)
        return self.lhs.mask ^ self.rhs.mask

    @property
    def pieces_agree(self) -> bool | None:
        """Does the union of relaxed squares give the same right-hand side?"""
        if self.lhs is None:
            return None
        return bool(np.array_equal(self.lhs.mask, self.rhs_pieces.mask))

    def differing_points(self) -> list[tuple[float, float]]:
        if self.lhs is None:
            return []
        x = self.lhs.grid.points
        return [(float(x[i]), float(x[j])) for i, j in np.argwhere(self.differing)]

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "level_eps": self.level_eps, "converged": self.converged,
             "reason": self.reason, "pieces_agree": self.pieces_agree,
             "n_differing": int(self.differing.sum())}
        if self.lhs is not None:
            d.update(lhs_size=len(self.lhs), rhs_size=len(self.rhs), rhs_pieces_size=len(self.rhs_pieces))
        d.update(self.extra)
        return d


def check_ness_condition(W: GridFunction, level_eps: float | None = None, tol: float | None = None,
                         W_sc: GridFunction | None = None) -> NessVerdict:
    """Zero level of W_sc, diagonalized, against the sc-hull of the diagonalized zero level of W.

    Requires min W = min W_hat = 0 (within ``tol``). The right-hand side is
    also formed as the union of [min A, max A]^2 over maximal pieces A of the
    zero level of W; ``pieces_agree`` reports whether both forms coincide.
    """
    if tol is None:
        tol = default_tol(W)
    if level_eps is None:
        level_eps = tol
    mW = grid_min(W)[0]
    mWh = grid_min(diagonalize_function(W))[0]
    extra = {"min_W": mW, "min_W_hat": mWh}
    if abs(mW) > tol or abs(mWh) > tol:
        return NessVerdict(NOT_APPLICABLE, level_eps=level_eps,
                           reason="needs min W = min W_hat = 0", extra=extra)
    if W_sc is None:
        W_sc = separately_convex_envelope(W)
    L0 = level_set(W, 0.0, level_eps)
    lhs = diagonalize_set(level_set(W_sc, 0.0, level_eps))
    rhs = separately_convex_hull_set(diagonalize_set(L0))
    rhs_pieces = relaxed_cartesian_union(L0)
    verdict = HOLDS if lhs == rhs else FAILS
    return NessVerdict(verdict, lhs, rhs, rhs_pieces, level_eps,
                       bool(W_sc.meta.get("converged", True)), extra=extra)

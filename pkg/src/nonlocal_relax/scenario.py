"""Scenario configuration: the set K, exponents, grid and domain measure."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .envelopes import distance_integrand
from .grid import GridFunction, GridSet, ScalarGrid, default_grid, sample_function
from .rules import ConvexRegion, DistanceRule, PlanarSet, cartesian_square, l1_sphere, parse_norm, well_set

FOUR_WELLS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))
FIVE_POINTS = FOUR_WELLS + ((2.0, 2.0),)


class ConfigError(ValueError):
    """Malformed scenario; ``where`` names the offending field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


@dataclass(frozen=True)
class Scenario:
    K: PlanarSet
    p: float = 2.0
    q: float = 1.0
    grid: ScalarGrid = field(default_factory=default_grid)
    omega: float = 1.0
    name: str = ""

    @cached_property
    def rule(self) -> DistanceRule:
        return DistanceRule(self.K, self.p, self.q)

    @cached_property
    def W(self) -> GridFunction:
        return distance_integrand(self.grid, self.K, self.p, self.q)

    @cached_property
    def K_grid(self) -> GridSet:
        return self.K.grid_trace(self.grid)

    def co_rule(self):
        """dist_q^p(., K^co), the closed form of the convex envelope of W."""
        region = ConvexRegion.hull_of(self.K)
        p, q = self.p, self.q
        return lambda X, Y: region.distance(X, Y, q) ** p

    def co_exact(self) -> GridFunction:
        return sample_function(self.grid, self.co_rule())

    def to_dict(self) -> dict:
        return {"name": self.name, "p": self.p, "q": "inf" if math.isinf(self.q) else self.q,
                "omega": self.omega, "K": self.K.label,
                "grid": {"lo": self.grid.lo, "hi": self.grid.hi, "n": self.grid.n}}


def preset(name: str, p: float = 2.0, q=1.0, grid: ScalarGrid | None = None, omega: float = 1.0,
           A=(-1.0, 1.0), radius: float = 1.0) -> Scenario:
    """Named example sets: four-well, five-point, diamond-boundary, cartesian."""
    grid = grid or default_grid()
    if name == "four-well":
        K = well_set(FOUR_WELLS, "four-well")
    elif name == "five-point":
        K = well_set(FIVE_POINTS, "five-point")
    elif name == "diamond-boundary":
        K = l1_sphere(radius)
    elif name == "cartesian":
        K = cartesian_square(A)
    else:
        raise ConfigError("preset", f"unknown preset {name!r}")
    return Scenario(K, float(p), parse_norm(q), grid, float(omega), name)


PRESETS = ("four-well", "five-point", "diamond-boundary", "cartesian")


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

def _num(d: dict, key: str, where: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}.{key}", "missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def _pair(v, where: str) -> tuple[float, float]:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v)):
        raise ConfigError(where, f"expected a pair of numbers, got {v!r}")
    return float(v[0]), float(v[1])


def _parse_K(d, where: str = "K") -> PlanarSet:
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    kind = d.get("type")
    if kind == "points":
        pts = d.get("points")
        if not isinstance(pts, list) or not pts:
            raise ConfigError(f"{where}.points", "expected a nonempty list of pairs")
        return well_set([_pair(v, f"{where}.points[{i}]") for i, v in enumerate(pts)], d.get("label", "points"))
    if kind == "norm_sphere":
        norm = d.get("norm", "l1")
        if norm != "l1":
            raise ConfigError(f"{where}.norm", f"only 'l1' is supported, got {norm!r}")
        r = _num(d, "radius", where, 1.0)
        if not r > 0:
            raise ConfigError(f"{where}.radius", "must be positive")
        return l1_sphere(r)
    if kind == "cartesian":
        A = d.get("A")
        if (not isinstance(A, list) or not A
                or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in A)):
            raise ConfigError(f"{where}.A", "expected a nonempty list of numbers")
        return cartesian_square(A)
    raise ConfigError(f"{where}.type", f"expected 'points', 'norm_sphere' or 'cartesian', got {kind!r}")


def scenario_from_dict(d: dict, name: str = "") -> Scenario:
    if not isinstance(d, dict):
        raise ConfigError("scenario", "expected a JSON object")
    if "preset" in d:
        base = preset(d["preset"])
        K = base.K
        name = name or d["preset"]
    else:
        if "K" not in d:
            raise ConfigError("K", "missing")
        K = _parse_K(d["K"])
    p = _num(d, "p", "scenario", 2.0)
    if p < 1:
        raise ConfigError("scenario.p", f"must be >= 1, got {p}")
    q = d.get("q", 1)
    try:
        q = parse_norm(q)
    except (TypeError, ValueError) as e:
        raise ConfigError("scenario.q", str(e)) from None
    g = d.get("grid", {})
    if not isinstance(g, dict):
        raise ConfigError("grid", "expected an object")
    lo, hi = _num(g, "lo", "grid", -3.0), _num(g, "hi", "grid", 3.0)
    n = g.get("n", 241)
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError("grid.n", f"expected an integer, got {n!r}")
    try:
        grid = ScalarGrid(lo, hi, n)
    except ValueError as e:
        raise ConfigError("grid", str(e)) from None
    omega = _num(d, "omega", "scenario", 1.0)
    if not omega > 0:
        raise ConfigError("scenario.omega", "must be positive")
    return Scenario(K, p, q, grid, omega, name or d.get("name", K.label))


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(str(path), e.strerror or str(e)) from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    return scenario_from_dict(d, d.get("name", path.stem) if isinstance(d, dict) else "")

"""Command-line front end.

Subcommands write CSV grids and JSON reports into ``--out`` (default: the
current directory). Exit codes: 0 success, 2 configuration error,
3 verification failure, 4 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .conditions import check_minhat_condition, check_ness_condition
from .envelopes import (convex_envelope, default_tol, diagonalize_function, grid_min,
                        separately_convex_envelope, separately_level_convex_envelope)
from .experiments import VERIFIERS
from .grid import ScalarGrid, boundary_tainted
from .minimize import minimize_discrete
from .scenario import ConfigError, Scenario, load_scenario
from .sets import (convex_hull_set, diagonalize_set, maximal_cartesian_subsets,
                   relaxed_cartesian_union, separately_convex_hull_set)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_NONCONVERGED = 4

HEADER = ("xi", "zeta", "value")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_grid_csv(path: Path, grid: ScalarGrid, values: np.ndarray) -> None:
    """Row-major long-form CSV with header ``xi,zeta,value``."""
    x = [_fmt(a) for a in grid.points]
    vals = np.asarray(values, dtype=float)
    lines = [",".join(HEADER)]
    for i, xi in enumerate(x):
        row = vals[i]
        lines.extend(f"{xi},{x[j]},{_fmt(row[j])}" for j in range(len(x)))
    path.write_text("\n".join(lines) + "\n")


def write_points_csv(path: Path, points, values) -> None:
    lines = [",".join(HEADER)]
    lines.extend(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}" for (a, b), v in zip(points, values))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_envelope(sc: Scenario, out: Path, args) -> int:
    W = sc.W
    W_co = convex_envelope(W, method=args.method)
    W_sc = separately_convex_envelope(W)
    W_slc = separately_level_convex_envelope(W, np.linspace(W.values.min(), W.values.max(), args.levels))
    W_hat = diagonalize_function(W)
    g = sc.grid
    for name, F in (("W", W), ("W_co", W_co), ("W_sc", W_sc), ("W_slc", W_slc), ("W_hat", W_hat)):
        write_grid_csv(out / f"{name}.csv", g, F.values)
    tol = default_tol(W)
    keep = ~boundary_tainted(g)
    diff = float(np.abs(W_sc.values - W_co.values)[keep].max()) if keep.any() else 0.0
    summary = {
        "scenario": sc.to_dict(),
        "minima": {name: grid_min(F)[0] for name, F in
                   (("W", W), ("W_co", W_co), ("W_sc", W_sc), ("W_slc", W_slc), ("W_hat", W_hat))},
        "sc_equals_co": {"sup_diff": diff, "tol": tol, "holds": diff <= 2 * tol},
        "ordering_holds": bool(np.all(W_co.values <= W_sc.values + tol)
                               and np.all(W_sc.values <= W_slc.values + tol)
                               and np.all(W_slc.values <= W.values + tol)),
        "sc": {k: W_sc.meta[k] for k in ("converged", "sweeps", "change")},
        "slc_saturated": W_slc.meta["saturated"],
        "co_method": args.method,
    }
    write_json(out / "summary.json", summary)
    print(f"envelope: min W={summary['minima']['W']:.6g} min W_sc={summary['minima']['W_sc']:.6g} "
          f"sup|W_sc-W_co|={diff:.3g}")
    return EXIT_OK if W_sc.meta["converged"] else EXIT_NONCONVERGED


def cmd_sets(sc: Scenario, out: Path, args) -> int:
    K = sc.K_grid
    g = sc.grid
    if len(K) == 0:
        raise ConfigError("K", "no grid node lies on K; refine the grid or move the set onto it")
    sets = {"K": K, "K_hat": diagonalize_set(K), "K_sc": separately_convex_hull_set(K),
            "K_co": convex_hull_set(K), "K_rlx": relaxed_cartesian_union(K)}
    for name, S in sets.items():
        write_grid_csv(out / f"{name}.csv", g, S.mask.astype(float))
    pieces = [{"values": pc.values(g), "interval": [pc.values(g)[0], pc.values(g)[-1]]}
              for pc in maximal_cartesian_subsets(K)]
    write_json(out / "pieces.json", {"scenario": sc.to_dict(), "pieces": pieces,
                                     "sizes": {k: len(v) for k, v in sets.items()}})
    print("sets: " + " ".join(f"|{k}|={len(v)}" for k, v in sets.items()) + f" pieces={len(pieces)}")
    return EXIT_OK


def cmd_minimize(sc: Scenario, out: Path, args) -> int:
    if args.pieces < 1:
        raise ConfigError("--pieces", "must be >= 1")
    vg = sc.grid
    if args.value_grid:
        try:
            lo, hi, n = args.value_grid.split(",")
            vg = ScalarGrid(float(lo), float(hi), int(n))
        except ValueError as e:
            raise ConfigError("--value-grid", f"expected lo,hi,n ({e})") from None
    try:
        rep = minimize_discrete(sc.rule, args.pieces, vg, refine_rounds=args.refine_rounds,
                                mean_constraint=args.mean, omega=sc.omega)
    except ValueError as e:
        raise ConfigError("--mean", str(e)) from None
    data = rep.to_dict()
    data["scenario"] = sc.to_dict()
    write_json(out / "minimize.json", data)
    print(f"minimize: N={rep.pieces} best={rep.best_value:.12g} bounds=[{rep.lower_bound:.6g}, "
          f"{rep.upper_bound:.6g}] field={list(rep.best_field.values)}")
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def cmd_check(sc: Scenario, out: Path, args) -> int:
    W = sc.W
    W_sc = separately_convex_envelope(W)
    g = sc.grid
    x = g.points
    if args.condition == "minhat":
        v = check_minhat_condition(W, W_sc=W_sc)
        data = v.to_dict()
        hat = diagonalize_function(W_sc).values
        cells = np.argwhere(hat <= v.min_W + v.tol)
        write_points_csv(out / "witness.csv", [(x[i], x[j]) for i, j in cells], hat[tuple(cells.T)])
        converged = v.converged
    else:
        v = check_ness_condition(W, level_eps=args.level_eps, W_sc=W_sc)
        data = v.to_dict()
        pts = v.differing_points()
        # value 1: only in the left side, -1: only in the right side
        side = [1.0 if v.lhs.contains(a, b) else -1.0 for a, b in pts]
        write_points_csv(out / "differing.csv", pts, side)
        converged = v.converged
    data["scenario"] = sc.to_dict()
    data["condition"] = args.condition
    write_json(out / "verdict.json", data)
    print(f"check {args.condition}: {data['verdict']}")
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_verify(args, out: Path) -> int:
    name = args.preset
    kw = {}
    if args.p is not None and name != "indicator":
        kw["p"] = args.p
    if name == "diamond-boundary":
        if not 0 < args.fraction < 1:
            raise ConfigError("--fraction", "must lie in (0, 1)")
        kw.update(fraction=args.fraction, max_pieces=args.max_pieces)
    elif args.fraction != 0.5:
        raise ConfigError("--fraction", "only applies to diamond-boundary")
    if name in ("cartesian", "indicator"):
        kw["seed"] = args.seed
    rep = VERIFIERS[name](**kw)
    write_json(out / f"verify_{name}.json", rep.to_dict())
    for f in rep.findings:
        print(f"{'PASS' if f.passed else 'FAIL'}  {name}: {f.name}")
    if not rep.passed:
        return EXIT_VERIFY
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def read_grid_csv(path: Path) -> tuple[list[float], list[float], dict]:
    """Read a long-form (xi,zeta,value) or wide (header row of zeta values) grid CSV."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as e:
        raise ConfigError(str(path), e.strerror or str(e)) from None
    if not rows:
        raise ConfigError(str(path), "empty file")

    def num(s, line, col):
        try:
            return float(s)
        except ValueError:
            raise ConfigError(f"{path}:{line}", f"column {col}: not a number: {s!r}") from None

    vals = {}
    head = [c.strip() for c in rows[0]]
    if head == list(HEADER):
        for ln, r in enumerate(rows[1:], start=2):
            if len(r) != 3:
                raise ConfigError(f"{path}:{ln}", f"expected 3 fields, got {len(r)}")
            vals[(num(r[0], ln, 1), num(r[1], ln, 2))] = num(r[2], ln, 3)
    else:
        zetas = [num(c, 1, k + 2) for k, c in enumerate(head[1:])]
        for ln, r in enumerate(rows[1:], start=2):
            if len(r) != len(head):
                raise ConfigError(f"{path}:{ln}", f"expected {len(head)} fields, got {len(r)}")
            xi = num(r[0], ln, 1)
            for k, z in enumerate(zetas):
                vals[(xi, z)] = num(r[k + 1], ln, k + 2)
    xs = sorted({k[0] for k in vals})
    zs = sorted({k[1] for k in vals})
    if len(vals) != len(xs) * len(zs):
        raise ConfigError(str(path), f"not a full grid: {len(vals)} cells for {len(xs)}x{len(zs)} nodes")
    return xs, zs, vals


def cmd_export_plot(args, out: Path) -> int:
    src = Path(args.grid)
    xs, zs, vals = read_grid_csv(src)
    target = Path(args.output) if args.output else out / f"{src.stem}_long.csv"
    write_points_csv(target, [(a, b) for a in xs for b in zs], [vals[(a, b)] for a in xs for b in zs])
    print(f"export-plot: {len(xs)}x{len(zs)} cells -> {target}")
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonlocal-relax",
                                 description="Envelopes, nonlocal inclusions and relaxation experiments.")
    ap.add_argument("--out", default=".", help="output directory (created if missing)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("envelope", help="W and its co/sc/slc envelopes and diagonalization")
    p.add_argument("scenario")
    p.add_argument("--method", choices=("hull", "legendre"), default="hull")
    p.add_argument("--levels", type=int, default=512, help="level count for the slc envelope")

    p = sub.add_parser("sets", help="K, K_hat, K_sc, K_co, K_rlx and maximal pieces")
    p.add_argument("scenario")

    p = sub.add_parser("minimize", help="discrete minimization over N equal pieces")
    p.add_argument("scenario")
    p.add_argument("--pieces", type=int, required=True)
    p.add_argument("--mean", type=float, default=None)
    p.add_argument("--refine-rounds", type=int, default=3)
    p.add_argument("--value-grid", default=None, help="lo,hi,n (default: the scenario grid)")

    p = sub.add_parser("check", help="necessary-condition verdicts")
    p.add_argument("scenario")
    p.add_argument("--condition", choices=("minhat", "ness"), required=True)
    p.add_argument("--level-eps", type=float, default=None)

    p = sub.add_parser("verify", help="run a preset verification pipeline")
    p.add_argument("preset", choices=sorted(VERIFIERS))
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--max-pieces", type=int, default=3)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("export-plot", help="reshape a grid CSV into long-form rows")
    p.add_argument("grid")
    p.add_argument("-o", "--output", default=None)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            return cmd_verify(args, out)
        if args.command == "export-plot":
            return cmd_export_plot(args, out)
        sc = load_scenario(args.scenario)
        handler = {"envelope": cmd_envelope, "sets": cmd_sets,
                   "minimize": cmd_minimize, "check": cmd_check}[args.command]
        return handler(sc, out, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

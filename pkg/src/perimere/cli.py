"""Command-line pipeline: validate, tree, barcode, distance, unroll,
count-shadows, bounds, bench.

Outputs are machine-readable (JSON, CSV, or DOT) and byte-deterministic for
identical inputs and flags.  Exit codes: 0 success, 1 input error, 2
enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

from . import barcode as bc
from . import mergetree as mt
from . import pgraph, transport
from .lattice import (BudgetExceeded, DEFAULT_ENUMERATION_BUDGET, IntMatrix,
                      count_cosets_in_ball, unit_ball_volume)
from .pgraph import GraphError
from .synthetic import torus_grid


@dataclass
class RunConfig:
    tolerance: float = 1e-9
    budget: int = DEFAULT_ENUMERATION_BUDGET
    fmt: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not (0 < self.budget <= 10**8):
            raise ValueError("budget must be in (0, 1e8]")


def _jdump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fin(x: float):
    return "inf" if math.isinf(x) else x


def parse_sublattice(spec: str, dim: int) -> IntMatrix:
    """Semicolon-separated rows of comma-separated integers; square, nonsingular."""
    rows = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        rows.append([int(tok) for tok in chunk.split(",")])
    m = IntMatrix.from_rows(rows)
    if m.rows != dim or m.cols != dim:
        raise GraphError(f"sublattice must be {dim}x{dim}")
    if m.det() == 0:
        raise GraphError("sublattice matrix is singular")
    return m


def cmd_validate(args, cfg: RunConfig) -> int:
    g = pgraph.parse(args.input)
    d = pgraph.max_shift_magnitude(g)
    conn = "connected" if g.is_connected() else "disconnected"
    _emit(f"n={g.n} m={g.m} D={d} {conn}\n", args.out)
    return 0


def cmd_tree(args, cfg: RunConfig) -> int:
    g = pgraph.parse(args.input)
    tree = mt.build(g)
    if cfg.fmt == "dot":
        _emit(tree.to_dot(), args.out)
    else:
        _emit(_jdump(tree.to_json_dict()), args.out)
    return 0


def cmd_barcode(args, cfg: RunConfig) -> int:
    g = pgraph.parse(args.input)
    code = bc.extract(mt.build(g))
    if cfg.fmt == "csv":
        _emit(bc.to_csv(code), args.out)
    else:
        _emit(_jdump(bc.to_json_dict(code)), args.out)
    return 0


def cmd_distance(args, cfg: RunConfig) -> int:
    ga = pgraph.parse(args.a)
    gb = pgraph.parse(args.b)
    ba = bc.extract(mt.build(ga))
    bb = bc.extract(mt.build(gb))
    total, eras = transport.barcode_distance(ba, bb, per_era=True)
    _emit(_jdump({
        "per_era": [{"exp": i, "distance": _fin(v)} for i, v in enumerate(eras)],
        "total": _fin(total),
    }), args.out)
    return 0


def cmd_unroll(args, cfg: RunConfig) -> int:
    g = pgraph.parse(args.input)
    s = parse_sublattice(args.sublattice, g.dim)
    _emit(_jdump(pgraph.serialize(pgraph.unroll(g, s))), args.out)
    return 0


def cmd_count_shadows(args, cfg: RunConfig) -> int:
    g = pgraph.parse(args.input)
    tree = mt.build(g)
    t = args.component_at
    rows = []
    for beam in tree.beams:
        if beam.birth <= t < beam.death:
            coeff, exp, basis = beam.monomial_at(t)
            predicted = coeff * unit_ball_volume(exp) * args.radius ** exp
            counted = count_cosets_in_ball(g.basis, basis, args.radius, cfg.budget)
            rows.append({
                "beam": beam.index,
                "birth_vertex": beam.birth_vertex,
                "coeff": coeff,
                "exp": exp,
                "predicted": predicted,
                "counted": counted,
            })
    rows.sort(key=lambda r: r["beam"])
    _emit(_jdump({"at": t, "radius": args.radius, "components": rows}), args.out)
    return 0


def cmd_bounds(args, cfg: RunConfig) -> int:
    g = pgraph.parse(args.input)
    mu0 = transport.multiplicity_bound(g)
    _emit(_jdump({
        "D": pgraph.max_shift_magnitude(g),
        "m": g.m,
        "n": g.n,
        "inverse_norm": g.basis.inverse_norm,
        "mu0": mu0,
        "stability_constant": 2 * (g.dim + 1) * mu0,
    }), args.out)
    return 0


def cmd_bench(args, cfg: RunConfig) -> int:
    side = max(2, round(args.n ** (1 / 3.0)))
    g = torus_grid(side, seed=cfg.seed)
    t0 = time.perf_counter()
    tree = mt.build(g)
    dt = time.perf_counter() - t0
    _emit(_jdump({
        "side": side,
        "n": g.n,
        "m": g.m,
        "build_seconds": dt,
        "beams": len(tree.beams),
        "events": len(tree.events),
    }), args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance (default 1e-9)")
    common.add_argument("--budget", type=int, default=None,
                        help="enumeration point budget (default 1e8; env PERIMERE_BUDGET overrides)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    common.add_argument("--out", default=None, help="write output to a file instead of stdout")

    p = argparse.ArgumentParser(prog="perimere",
                                description="Periodic merge trees, 0-th barcodes, and barcode distances")
    sub = p.add_subparsers(dest="command", required=True)

    def add_fmt(sp, *kinds):
        grp = sp.add_mutually_exclusive_group()
        for k in kinds:
            grp.add_argument(f"--{k}", dest="fmt", action="store_const", const=k)

    sp = sub.add_parser("validate", parents=[common],
                        help="parse a graph and report n, m, D, connectivity")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("tree", parents=[common],
                        help="build and serialize the periodic merge tree")
    sp.add_argument("input")
    add_fmt(sp, "json", "dot")
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("barcode", parents=[common],
                        help="extract the periodic 0-th barcode")
    sp.add_argument("input")
    add_fmt(sp, "json", "csv")
    sp.set_defaults(func=cmd_barcode)

    sp = sub.add_parser("distance", parents=[common],
                        help="alternating 1-Wasserstein distance between two graphs' barcodes")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("unroll", parents=[common],
                        help="rewrite the quotient over a sublattice")
    sp.add_argument("input")
    sp.add_argument("--sublattice", required=True,
                    help="integer rows 'r1;r2;...' e.g. '2,0;0,1'")
    sp.set_defaults(func=cmd_unroll)

    sp = sub.add_parser("count-shadows", parents=[common],
                        help="empirical shadow count vs the monomial prediction")
    sp.add_argument("input")
    sp.add_argument("--component-at", type=float, required=True, dest="component_at")
    sp.add_argument("--radius", type=float, required=True)
    sp.set_defaults(func=cmd_count_shadows)

    sp = sub.add_parser("bounds", parents=[common],
                        help="report D, the multiplicity bound, and the stability constant")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("bench", parents=[common],
                        help="time the tree construction on a random torus grid")
    sp.add_argument("--n", type=int, default=100000, help="approximate vertex count")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    budget = args.budget
    if budget is None:
        env = os.environ.get("PERIMERE_BUDGET")
        budget = int(env) if env else DEFAULT_ENUMERATION_BUDGET
    try:
        cfg = RunConfig(tolerance=args.tol, budget=budget,
                        fmt=getattr(args, "fmt", None) or "json", seed=args.seed)
        return args.func(args, cfg)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

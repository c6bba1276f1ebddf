"""``vortexlab`` command line.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 ambiguous or
unstable bubble-tree extraction. ``selftest`` exits 1 when a criterion fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (AmbiguousExponents, AmbiguousZero, FieldNotUnimodular, InsufficientRange,
                     NonConvergence, UnstableLimit, ValidationError, WindingAmbiguous)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER, EXIT_AMBIGUOUS = 0, 1, 2, 3, 4

log = logging.getLogger("vortexlab")


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def _write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


# -- commands ------------------------------------------------------------------

def _load_problem(args):
    from .config import SolverParams, ZeroConfig
    from .vortex import default_params

    config = ZeroConfig.from_json(_read_json(args.zeros))
    if args.params:
        params = SolverParams.from_json(_read_json(args.params))
    else:
        over = {}
        if args.grid is not None:
            over["grid_points_per_axis"] = args.grid
        if args.radius is not None:
            over["domain_radius"] = args.radius
        params = default_params(config, **over)
    return config, params


def cmd_solve(args):
    from .diagnostics import decay_exponent, write_solution_csv
    from .vortex import solve_vortex

    config, params = _load_problem(args)
    sol = solve_vortex(config, params)
    summary = sol.summary()
    slope = None
    if config.degree:
        hi = min(10.0, 0.8 * params.domain_radius)
        try:
            slope = decay_exponent(sol, (4.0, hi))
        except (InsufficientRange, ValidationError) as exc:
            log.warning("decay slope unavailable: %s", exc)
    summary["decay_slope"] = slope
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_solution_csv(sol, out / "solution.csv", stride=args.stride)
    _write_json(summary, out / "summary.json")
    _emit(summary)
    return EXIT_OK


def cmd_degrees(args):
    from .diagnostics import local_degrees
    from .vortex import solve_vortex

    config, params = _load_problem(args)
    found = local_degrees(solve_vortex(config, params), args.probe_radius)
    _emit({"prescribed": config.to_json(), "recovered": found.to_json(),
           "degree": found.degree})
    return EXIT_OK


def cmd_tree(args):
    from .bubbling import ConfigurationFamily, check_convergence, extract_bubble_tree

    fam = ConfigurationFamily.from_json(_read_json(args.family))
    tree, maps, report = extract_bubble_tree(fam)
    conv = check_convergence(fam, tree, maps, tol=args.tol)
    out = Path(args.out)
    _write_json(tree.to_json(), out / "tree.json")
    _write_json(maps.to_json(), out / "reparams.json")
    _write_json({"extraction": report.to_json(), "convergence": conv.to_json()}, out / "report.json")
    _emit({"tree": tree.to_json(),
           "degrees": [tree.vortex[v].degree for v in tree.T1],
           "convergence": conv.verdict})
    print(conv.text(), file=sys.stderr)
    return EXIT_OK


def cmd_check(args):
    from .bubbling import ConfigurationFamily, MobiusFamily, check_convergence
    from .stable_maps import BubbleTree

    fam = ConfigurationFamily.from_json(_read_json(args.family))
    tree = BubbleTree.from_json(_read_json(args.tree))
    maps = MobiusFamily.from_json(_read_json(args.reparams))
    rep = check_convergence(fam, tree, maps, tol=args.tol)
    if args.json:
        _emit(rep.to_json())
    else:
        print(rep.text())
    return EXIT_OK


def cmd_maslov(args):
    from .maslov import SymplecticLoop, maslov_index, sample_loop

    if args.loop:
        loop = SymplecticLoop.from_json(_read_json(args.loop))
    else:
        ds = args.d if args.family != "diag" else [int(x) for x in args.degrees.split(",")]
        loop = sample_loop(args.family, ds, args.n, args.samples)
    m = maslov_index(loop)
    print(m)
    return EXIT_OK


def cmd_index(args):
    from .config import ZeroConfig
    from .maslov import IndexData, chern_pairing, fredholm_index

    chern = args.chern
    if args.zeros:
        chern = chern_pairing(ZeroConfig.from_json(_read_json(args.zeros)))
    if chern is None:
        raise ValidationError("give --chern or --zeros")
    print(fredholm_index(IndexData(args.dimM, args.dimG, chern)))
    return EXIT_OK


HARDY_FUNCTIONS = {
    "const": lambda z: np.ones(z.shape),
    "bracket": lambda z: (1 + np.abs(z) ** 2) ** -1.0,
    "x1": lambda z: z.real / (1 + np.abs(z) ** 2) ** 1.5,
    "bump": lambda z: np.where(np.abs(z) < 3, np.exp(-1 / np.maximum(1 - np.abs(z) ** 2 / 9, 1e-300)), 0.0),
}


def cmd_hardy(args):
    from .weighted import GridFunction, WeightParams, hardy_check

    w = WeightParams(args.p, args.lam)
    if args.csv:
        u = GridFunction.from_csv(args.csv, domain="disk")
    else:
        u = GridFunction.sample(HARDY_FUNCTIONS[args.fn], args.radius, args.grid)
    res = hardy_check(u, w, slack=args.slack)
    _emit(res.to_json())
    return EXIT_OK


def cmd_kernel(args):
    from .weighted import WeightParams, dbar_kernel_check

    _emit(dbar_kernel_check(args.d, WeightParams(args.p, args.lam)))
    return EXIT_OK


def cmd_selftest(args):
    from .acceptance import run_all

    sel = None
    if args.only:
        sel = {int(x) for x in args.only.split(",")}
    results = run_all(sel, verbose=not args.quiet, seed=args.seed)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_FAIL


# -- parser --------------------------------------------------------------------

def _solver_args(p):
    p.add_argument("--zeros", required=True, help="zero configuration JSON")
    p.add_argument("--grid", type=int, help="grid points per axis")
    p.add_argument("--radius", type=float, help="domain radius")
    p.add_argument("--params", help="solver parameter JSON (overrides --grid/--radius)")


def build_parser():
    ap = argparse.ArgumentParser(prog="vortexlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"vortexlab {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the vortex equations for prescribed zeros")
    _solver_args(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--stride", type=int, default=1, help="CSV row stride per axis")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("degrees", help="solve and recover local degrees")
    _solver_args(p)
    p.add_argument("--probe-radius", type=float)
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("tree", help="extract the limit bubble tree of a family")
    p.add_argument("--family", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("check", help="check convergence of a family to a tree")
    p.add_argument("--family", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--reparams", required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("maslov", help="Maslov index of a unitary loop")
    p.add_argument("--family", default="zd-id", choices=["const", "zd-id", "diag"])
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--degrees", default="1", help="comma-separated degrees for --family diag")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--samples", type=int)
    p.add_argument("--loop", help="loop JSON instead of a named family")
    p.set_defaults(func=cmd_maslov)

    p = sub.add_parser("index", help="evaluate dim M - 2 dim G + 2 <c1, [W]>")
    p.add_argument("--dimM", type=int, required=True)
    p.add_argument("--dimG", type=int, required=True)
    p.add_argument("--chern", type=int)
    p.add_argument("--zeros", help="take the Chern pairing from a zero configuration")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("hardy", help="numerical Hardy inequality")
    p.add_argument("--fn", default="bracket", choices=sorted(HARDY_FUNCTIONS))
    p.add_argument("--csv", help="grid function CSV (s,t,re0,im0,...)")
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--radius", type=float, default=12.0)
    p.add_argument("--slack", type=float, default=0.05)
    p.set_defaults(func=cmd_hardy)

    p = sub.add_parser("kernel", help="verify the d-bar kernel basis")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--seed", type=int, help="seed for the randomised suites")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (AmbiguousExponents, UnstableLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (NonConvergence, AmbiguousZero, WindingAmbiguous, FieldNotUnimodular,
            InsufficientRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command line entry point.

Exit codes: 0 success (all checks pass), 1 a check failed, 2 an error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .certify import CertifyConfig, certify_browder
from .errors import BrowderError
from .fixset import approximate_fixed_set, connected_components
from .geometry import Box, Region, build_grid
from .index_core import IndexOptions, index
from .mapdef import FIXTURES, builtin_fixture
from .problem_file import dumps_problem, load_problem
from .report import FORMATS, cells_csv, emit_report

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def resolve_problem(arg):
    """A path to a problem file, or a fixture name (optionally ``fixture:NAME``)."""
    name = arg[len("fixture:"):] if arg.startswith("fixture:") else None
    if name is None and not Path(arg).exists() and arg in FIXTURES:
        name = arg
    if name is not None:
        return builtin_fixture(name)
    return load_problem(arg)


def _config(problem, args):
    base = dict(problem.config or {})
    for key in ("resolution", "tol", "margin", "max_refine", "seed_density"):
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    return CertifyConfig(**base)


def _write(text, path):
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_index(args):
    problem = resolve_problem(args.problem)
    n = problem.box.dim
    vals = [float(v) for v in args.region.split(",")]
    if n == 1:
        if len(vals) % 2 or not vals:
            raise ValueError("1-D region needs pairs a,b[,a2,b2...]")
        pairs = sorted(zip(vals[0::2], vals[1::2]))
        if any(b1 > a2 for (_, b1), (a2, _) in zip(pairs, pairs[1:])):
            raise ValueError("1-D intervals must not overlap")
        boxes = [Box([a], [b]) for a, b in pairs]
    else:
        if len(vals) != 2 * n:
            raise ValueError(f"region needs {2 * n} numbers lo1,hi1,...,lo{n},hi{n}")
        boxes = [Box(vals[0::2], vals[1::2])]
    node = args.node
    if not 0 <= node < problem.param_space.size:
        raise ValueError(f"node must be in 0..{problem.param_space.size - 1}")
    opts = IndexOptions(margin=args.margin, max_refine=args.max_refine, seed_density=args.seed_density)
    f = problem.slice_map(node)
    certs = [index(f, Region.from_box(b), opts) for b in boxes]
    out = {
        "node": node,
        "value": sum(c.value for c in certs),
        "parts": [{"lo": b.lo.tolist(), "hi": b.hi.tolist(), "value": c.value,
                   "method": c.method, "boundary_margin": float(f"{c.boundary_margin:.9g}"),
                   "required_margin": float(f"{c.required_margin:.9g}"),
                   "samples_used": c.samples_used} for b, c in zip(boxes, certs)],
    }
    _write(json.dumps(out, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def cmd_components(args):
    problem = resolve_problem(args.problem)
    config = _config(problem, args)
    grid = build_grid(problem.box, config.cells_per_dim(problem.box.dim))
    afs = approximate_fixed_set(problem, grid, tol=config.tol)
    comps = connected_components(afs)
    if args.format == "csv":
        text = cells_csv({c.id: c.cells for c in comps})
    else:
        k = problem.param_space.size
        rows = [{"id": c.id, "n_cells": int(c.size), "covered_nodes": len(c.param_coverage),
                 "coverage_fraction": float(f"{c.coverage_fraction(k):.9g}"),
                 "isolation_margin": None if c.isolation_margin == float("inf") else c.isolation_margin}
                for c in comps]
        text = json.dumps({"name": problem.name, "cells_per_dim": list(grid.cells_per_dim),
                           "tol_mode": afs.tol_mode, "components": rows},
                          indent=2, sort_keys=True) + "\n"
    _write(text, args.output)
    return EXIT_OK


def cmd_certify(args):
    problem = resolve_problem(args.problem)
    report = certify_browder(problem, _config(problem, args))
    text = emit_report(report, args.format, args.output)
    if not args.output:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_fixtures(args):
    if args.action == "list":
        _write("".join(f"{name}\n" for name in FIXTURES), None)
        return EXIT_OK
    if not args.name:
        raise ValueError("fixtures export needs a fixture name")
    _write(dumps_problem(builtin_fixture(args.name)), args.output)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="browder", description="Fixed-point indices and Browder certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def tuning(sp):
        sp.add_argument("--resolution", type=int, help="Y cells per axis")
        sp.add_argument("--tol", type=float, help="fixed residual tolerance (default: local auto)")
        sp.add_argument("--margin", type=float, help="boundary margin (default: auto)")
        sp.add_argument("--max-refine", dest="max_refine", type=int)
        sp.add_argument("--seed-density", dest="seed_density", type=int)
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    sp = sub.add_parser("index", help="fixed-point index of F_x on a box")
    sp.add_argument("problem")
    sp.add_argument("--node", type=int, required=True)
    sp.add_argument("--region", required=True, help="a,b[,...] in 1-D or lo1,hi1,...,lon,hin; write --region=-1,1 for negative values")
    sp.add_argument("--margin", type=float)
    sp.add_argument("--max-refine", dest="max_refine", type=int, default=14)
    sp.add_argument("--seed-density", dest="seed_density", type=int, default=4)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("components", help="connected components of the approximate fixed set")
    sp.add_argument("problem")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    tuning(sp)
    sp.set_defaults(func=cmd_components)

    sp = sub.add_parser("certify", help="run the full certification")
    sp.add_argument("problem")
    sp.add_argument("--format", choices=FORMATS, default="text")
    tuning(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("fixtures", help="list or export built-in problems")
    sp.add_argument("action", choices=("list", "export"))
    sp.add_argument("name", nargs="?")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BrowderError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

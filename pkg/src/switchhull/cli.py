"""Command line: ``switchhull {check,repair,support,exactness,conjecture,selftest}``.

Exit status 0 means the check passed, 1 that it failed and 2 that the input
could not be used (bad flags, bad point file, missing ``alpha``/``beta``).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import experiments, pointfile, selftest, solver
from .hull2 import ConsistencyError, System, check
from .oracle import Objective, support_atoms
from .repair import PreconditionError, RepairError, repair

SYSTEM_CHOICES = ("disj", "disjunctive", "nobeta", "minimal", "conj", "conjecture")


def _load(path, system):
    z, has_alpha = pointfile.load(path)
    pointfile.require_lift(z, has_alpha, system)
    return z


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def cmd_check(args) -> int:
    z = _load(args.file, args.system)
    try:
        rep = check(z, args.system)
    except ConsistencyError as exc:
        print(f"inconsistent evaluation: {exc}", file=sys.stderr)
        return 1
    print(rep.format())
    return 0 if rep else 1


def cmd_repair(args) -> int:
    z = _load(args.file, "minimal")
    try:
        out = repair(z)
    except PreconditionError as exc:
        print(f"not repairable: {exc}", file=sys.stderr)
        print(check(z, "minimal").format(), file=sys.stderr)
        return 1
    except (RepairError, ConsistencyError) as exc:
        print(f"repair failed: {exc}", file=sys.stderr)
        return 1
    _emit(pointfile.dumps(out), args.out)
    rep = check(out, "nobeta")
    if not rep:
        print(rep.format(), file=sys.stderr)
        return 1
    return 0


def cmd_support(args) -> int:
    obj = Objective.from_coefficients(args.objective)
    try:
        res = solver.support(args.system, obj, args.accuracy)
    except solver.SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    oracle, atom = support_atoms(obj)
    print(json.dumps({
        "system": res.system.value,
        "value": experiments.fmt(res.value),
        "upper_bound": experiments.fmt(res.upper_bound),
        "certified_gap": experiments.fmt(res.certified_gap),
        "iterations": res.iterations,
        "hull_value": experiments.fmt(oracle),
        "hull_atom": {"y": atom.ybits, "x": list(atom.x)},
    }, indent=2))
    if args.out:
        _emit(pointfile.dumps(res.argmax), args.out)
    return 0


def _experiment(kind, args) -> list:
    rows = experiments.run_experiment(kind, args.trials, args.seed, args.system,
                                      args.accuracy, args.workers)
    _emit(experiments.csv_text(rows), args.out)
    sidecar = None
    if args.out and args.out != "-":
        sidecar = args.out + ".counterexamples.jsonl"
    experiments.dump_counterexamples(rows, sidecar)
    print(experiments.summary_line(rows), file=sys.stderr)
    return rows


def cmd_exactness(args) -> int:
    rows = _experiment("exactness", args)
    return 0 if all(r.status == "ok" for r in rows) else 1


def cmd_conjecture(args) -> int:
    if args.force_cY:
        rows = _experiment("witness", args)
        found = [r for r in rows if r.status != "solver_error" and r.gap > args.witness_gap]
        print(f"{len(found)} trial(s) with gap > {args.witness_gap:g}", file=sys.stderr)
        return 0 if found else 1
    rows = _experiment("conjecture", args)
    return 0 if all(r.status == "ok" for r in rows) else 1


def cmd_selftest(args) -> int:
    return 0 if selftest.run(args.seed) else 1


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _accuracy(s):
    v = float(s)
    if not v >= 1e-8:
        raise argparse.ArgumentTypeError("must be at least 1e-8")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="switchhull", description="Convex-hull representations with two switching variables.")
    sub = p.add_subparsers(dest="command", required=True)

    def system_flag(sp, default):
        sp.add_argument("--system", choices=SYSTEM_CHOICES, default=default,
                        type=lambda s: s.lower())

    sp = sub.add_parser("check", help="evaluate every constraint of a system at a point file")
    sp.add_argument("file", help="point file (JSON), '-' for stdin")
    system_flag(sp, "minimal")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("repair", help="complete a minimal-system certificate")
    sp.add_argument("file")
    sp.add_argument("--out", help="where to write the repaired point (default stdout)")
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("support", help="maximize a linear objective over a representation")
    sp.add_argument("--objective", nargs=8, type=float, required=True,
                    metavar=("c_x1", "c_x2", "Q11", "Q12", "Q22", "c_y1", "c_y2", "c_Y"))
    system_flag(sp, "minimal")
    sp.add_argument("--accuracy", type=_accuracy, default=1e-6)
    sp.add_argument("--out", help="write the maximizer as a point file")
    sp.set_defaults(func=cmd_support)

    for name, func, default in (("exactness", cmd_exactness, "minimal"),
                                ("conjecture", cmd_conjecture, "conjecture")):
        sp = sub.add_parser(name, help=f"{name} experiment (CSV report)")
        sp.add_argument("--trials", type=_positive_int, default=100)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--accuracy", type=_accuracy, default=1e-6)
        sp.add_argument("--out", help="CSV path (default stdout)")
        sp.add_argument("--workers", type=_positive_int, default=1)
        system_flag(sp, default)
        sp.set_defaults(func=func)
    sp.add_argument("--force-cY", dest="force_cY", action="store_true",
                    help="balanced objectives with c_Y = +1, compared with the full hull")
    sp.add_argument("--witness-gap", type=float, default=1e-4)

    sp = sub.add_parser("selftest", help="run the property suites")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "system"):
        args.system = System.parse(args.system)
    try:
        return args.func(args)
    except pointfile.PointFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

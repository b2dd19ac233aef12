"""Command line entry point: ``polyincidence <subcommand> ...``.

Geometry always travels in JSON files; flags carry scalars and seeds only.
Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .analysis import (NonGenericProjection, balanced_fit_points, bound_report, fit_exponent,
                       generic_project, loglog_table, write_report_csv)
from .generators import FAMILIES, FamilySpec
from .incidence import (Config, IncidenceSet, check_axioms, incidences_bruteforce,
                        incidences_partitioned, rich_points)
from .partition import BisectionNotFound, Partition, cell_decompose
from .algebra.scalar import format_point

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(argv: Sequence[str], inputs: Sequence[str], seeds: Dict) -> dict:
    return {
        "command": list(argv),
        "inputs": {p: _digest(p) for p in inputs},
        "seeds": seeds,
        "tool": f"polyincidence {__version__}",
    }


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _write(out: Optional[str], text: str, manifest: dict, sidecar: bool) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    if sidecar:
        Path(out + ".manifest.json").write_text(_dump_json(manifest))


def _load_config(path: str) -> Config:
    try:
        doc = json.loads(Path(path).read_text())
        return Config.from_json(doc)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid config {path}: {exc}")


def _load_partition(path: str) -> Partition:
    try:
        return Partition.from_json(json.loads(Path(path).read_text()))
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid partition {path}: {exc}")


def _load_incidences(path: str, cfg: Config) -> IncidenceSet:
    try:
        rows = list(csv.DictReader(io.StringIO(Path(path).read_text())))
        pairs = [(int(r["point_index"]), int(r["object_index"])) for r in rows]
        return IncidenceSet(cfg.n_points, cfg.n_objects, pairs)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except (KeyError, ValueError) as exc:
        raise UsageError(f"invalid incidence file {path}: {exc}")


def _parse_params(items: Sequence[str]) -> Dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key] = int(value) if value.lstrip("-").isdigit() else value
    return out


# --- subcommands --------------------------------------------------------------

def cmd_generate(args, argv) -> int:
    params = _parse_params(args.param)
    for name in ("N", "N1", "N2", "n", "m", "d", "k", "plant"):
        v = getattr(args, name)
        if v is not None:
            params[name] = v
    try:
        cfg = FamilySpec(args.family, params, args.seed).build()
    except ValueError as exc:
        raise UsageError(str(exc))
    doc = cfg.to_json()
    doc["manifest"] = _manifest(argv, [], {"seed": args.seed})
    _write(args.out, _dump_json(doc), doc["manifest"], sidecar=False)
    if args.out:
        print(f"points={cfg.n_points} objects={cfg.n_objects} d={cfg.d} k={cfg.k}")
    return EXIT_OK


def cmd_partition(args, argv) -> int:
    cfg = _load_config(args.config)
    try:
        part = cell_decompose(cfg.points, args.rounds, mode=args.mode, tau=Fraction(args.tau),
                              seed=args.seed, budget=args.budget)
    except BisectionNotFound as exc:
        print(f"bisection failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc))
    bad = part.violations()
    doc = part.to_json()
    doc["manifest"] = _manifest(argv, [args.config], {"seed": args.seed})
    _write(args.out, _dump_json(doc), doc["manifest"], sidecar=False)
    if bad:
        print("partition invariant violated: " + "; ".join(bad), file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        print(f"rounds={part.r} degree={part.product_degree} cells={len(part.cells)} "
              f"boundary={len(part.boundary)}")
    return EXIT_OK


def cmd_count(args, argv) -> int:
    cfg = _load_config(args.config)
    inputs = [args.config]
    if args.partition:
        part = _load_partition(args.partition)
        inputs.append(args.partition)
        try:
            inc = incidences_partitioned(cfg, part)
        except ValueError as exc:
            raise UsageError(str(exc))
    else:
        inc = incidences_bruteforce(cfg, exact=args.exact)
    if args.out:
        _write(args.out, inc.to_csv(), _manifest(argv, inputs, {}), sidecar=True)
    print(f"incidences={inc.size}")
    print(f"candidate_pairs={inc.work.get('candidate_pairs', 0)}")
    return EXIT_OK


def cmd_check_axioms(args, argv) -> int:
    cfg = _load_config(args.config)
    if args.C0 is not None:
        if args.C0 < 1:
            raise UsageError("--C0 must be at least 1")
        cfg.C0 = args.C0
    inc = _load_incidences(args.incidences, cfg) if args.incidences else incidences_bruteforce(cfg)
    try:
        rep = check_axioms(cfg, inc)
    except ValueError as exc:
        raise UsageError(str(exc))
    inputs = [args.config] + ([args.incidences] if args.incidences else [])
    doc = {"C0": cfg.C0, "axioms": rep.to_json(), "manifest": _manifest(argv, inputs, {})}
    if args.out:
        _write(args.out, _dump_json(doc), doc["manifest"], sidecar=False)
    for axiom, res in rep.results.items():
        line = f"axiom ({axiom}): {res.status}"
        if res.detail:
            line += f" - {res.detail}"
        print(line)
    if rep.failed:
        print("failed: " + ", ".join(f"({a})" for a in rep.failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_rich(args, argv) -> int:
    cfg = _load_config(args.config)
    try:
        found = rich_points(cfg, args.r)
    except ValueError as exc:
        raise UsageError(str(exc))
    buf = io.StringIO()
    buf.write("point,multiplicity\n")
    for p, c in found:
        buf.write(f"{' '.join(format_point(p))},{c}\n")
    _write(args.out, buf.getvalue(), _manifest(argv, [args.config], {}), sidecar=True)
    if args.out:
        print(f"rich_points={len(found)}")
    return EXIT_OK


def cmd_project(args, argv) -> int:
    cfg = _load_config(args.config)
    try:
        image = generic_project(cfg, target=args.target, seed=args.seed, retries=args.retries)
    except NonGenericProjection as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc))
    doc = image.to_json()
    doc["manifest"] = _manifest(argv, [args.config], {"seed": args.seed})
    _write(args.out, _dump_json(doc), doc["manifest"], sidecar=False)
    if args.out:
        print(f"projected to R^{image.d} after {image.metadata['projection']['draws']} draw(s)")
    return EXIT_OK


def cmd_report(args, argv) -> int:
    if args.incidences and len(args.incidences) != len(args.config):
        raise UsageError("--incidences must list one file per --config")
    reports = []
    for t, path in enumerate(args.config):
        cfg = _load_config(path)
        inc = _load_incidences(args.incidences[t], cfg) if args.incidences else incidences_bruteforce(cfg)
        reports.append(bound_report(cfg, inc, Fraction(args.epsilon), Fraction(args.C2)))
    inputs = list(args.config) + list(args.incidences or [])
    _write(args.out, write_report_csv(reports), _manifest(argv, inputs, {}), sidecar=True)
    return EXIT_OK


def cmd_fit(args, argv) -> int:
    try:
        rows = list(csv.DictReader(io.StringIO(Path(args.report).read_text())))
        counts = [(int(r["n_points"]), int(r["n_objects"]), int(r["incidences"])) for r in rows]
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.report}")
    except (KeyError, ValueError) as exc:
        raise UsageError(f"invalid report {args.report}: {exc}")
    try:
        pts = balanced_fit_points(counts)
        fit = fit_exponent(pts)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.table:
        Path(args.table).write_text(loglog_table(pts))
    text = _dump_json({"fit": fit.to_json(), "manifest": _manifest(argv, [args.report], {})})
    if args.out:
        _write(args.out, text, {}, sidecar=False)
    print(f"slope={fit.slope:.6f} residual={fit.residual:.3g}")
    if args.expect is not None and not math.isclose(fit.slope, args.expect, abs_tol=args.tol):
        print(f"slope {fit.slope:.6f} outside {args.expect} +- {args.tol}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyincidence",
                                     description="Point-variety incidence experiments with polynomial partitioning.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a configuration from a family")
    p.add_argument("--family", required=True, choices=FAMILIES)
    for name in ("N", "N1", "N2", "n", "m", "d", "k", "plant"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("partition", help="iterated ham-sandwich cell decomposition")
    p.add_argument("--config", required=True)
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--mode", choices=("relaxed", "exact"), default="relaxed")
    p.add_argument("--tau", default="1/20")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("count", help="count incidences")
    p.add_argument("--config", required=True)
    p.add_argument("--partition")
    p.add_argument("--exact", action="store_true", help="test every pair exactly (slow)")
    p.add_argument("--out", help="CSV of incident pairs")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("check-axioms", help="check axioms (i)-(v)")
    p.add_argument("--config", required=True)
    p.add_argument("--incidences")
    p.add_argument("--C0", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_axioms)

    p = sub.add_parser("rich", help="list r-rich points of a flat configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rich)

    p = sub.add_parser("project", help="generic linear projection to R^(2k)")
    p.add_argument("--config", required=True)
    p.add_argument("--target", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("report", help="bound report CSV")
    p.add_argument("--config", required=True, nargs="+")
    p.add_argument("--incidences", nargs="+")
    p.add_argument("--epsilon", default="0")
    p.add_argument("--C2", default="1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("fit", help="log-log exponent fit over a report")
    p.add_argument("--report", required=True)
    p.add_argument("--table", help="write the log-log points here")
    p.add_argument("--expect", type=float)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        for name in ("tau", "epsilon", "C2"):
            if hasattr(args, name):
                Fraction(getattr(args, name))
        return args.func(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run = main

if __name__ == "__main__":
    sys.exit(main())

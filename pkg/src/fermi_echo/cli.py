"""Command-line front end: echo tables, non-Markovianity reports, sweeps."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import ConfigError, parse_document, read_document
from .runner import PipelineError, run_point, sweep, emit_csv

JOBS_ENV = "FERMI_ECHO_JOBS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; we reserve 2 for runtime
    # failures, so route usage problems through our own exception
    def error(self, message):
        raise _UsageError(message)


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",")]


def _add_point_flags(parser):
    parser.add_argument("--config", metavar="PATH",
                        help="JSON run description; flags override its entries")
    parser.add_argument("--nf", type=int, metavar="N", help="number of fermions")
    parser.add_argument("--beta", type=float, metavar="B", help="inverse temperature")
    parser.add_argument("--alpha", type=float, metavar="A",
                        help="dimensionless coupling strength")
    parser.add_argument("--omega", type=float, metavar="W", help="trap frequency")
    parser.add_argument("--gs", type=int, metavar="G", help="spin degeneracy")
    parser.add_argument("--cutoff", type=int, metavar="M", help="trap modes kept")
    parser.add_argument("--tmax", type=float, metavar="T", help="time horizon")
    parser.add_argument("--steps", type=int, metavar="K", help="time samples")
    parser.add_argument("--method", choices=("exact", "cumulant"))
    parser.add_argument("--out", metavar="PATH", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fermi-echo",
        description="Dephasing of an impurity qubit in a trapped ideal Fermi gas",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    echo = sub.add_parser("echo", help="time-resolved decoherence factor as CSV")
    _add_point_flags(echo)

    measure = sub.add_parser("measure", help="non-Markovianity report as JSON")
    _add_point_flags(measure)

    swp = sub.add_parser("sweep", help="scan one axis and tabulate the measure")
    _add_point_flags(swp)
    swp.add_argument("--axis", choices=("alpha", "beta", "omega"))
    swp.add_argument("--values", type=_float_list, metavar="V1,V2,...",
                     help="comma-separated axis values, increasing")
    swp.add_argument("--jobs", type=int, metavar="J",
                     help=f"worker processes (or ${JOBS_ENV})")
    return parser


def _overlay(doc: dict, args) -> dict:
    doc = dict(doc)
    gas = doc.get("gas", {})
    grid = doc.get("grid", {})
    if not isinstance(gas, dict):
        raise ConfigError("gas", "must be an object")
    if not isinstance(grid, dict):
        raise ConfigError("grid", "must be an object")
    gas = dict(gas)
    grid = dict(grid)
    for key, value in (
        ("n_fermions", args.nf),
        ("beta", args.beta),
        ("omega", args.omega),
        ("spin_degeneracy", args.gs),
        ("cutoff", args.cutoff),
    ):
        if value is not None:
            gas[key] = value
    for key, value in (("t_max", args.tmax), ("n_steps", args.steps)):
        if value is not None:
            grid[key] = value
    if args.alpha is not None:
        doc["alpha"] = args.alpha
    if args.method is not None:
        doc["method"] = args.method
    if gas:
        doc["gas"] = gas
    if grid:
        doc["grid"] = grid
    return doc


def _overlay_sweep(doc: dict, args) -> dict:
    if args.axis is not None:
        doc["axis"] = args.axis
    if args.values is not None:
        doc["values"] = args.values
    if args.jobs is not None:
        doc["parallelism"] = args.jobs
    elif JOBS_ENV in os.environ:
        raw = os.environ[JOBS_ENV]
        try:
            doc["parallelism"] = int(raw)
        except ValueError:
            raise ConfigError(JOBS_ENV, f"must be an integer, got {raw!r}") from None
    return doc


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="ascii", newline=""), True


def _report_json(record) -> str:
    report = record.report
    payload = {
        "n_v": report.n_v,
        "n_plus_final": float(report.n_plus[-1]),
        "n_minus_final": float(report.n_minus[-1]),
        "ratio_final": float(report.ratio[-1]),
        "expansion_intervals": [list(pair) for pair in report.expansion_intervals],
        "wall_time_s": record.wall_time,
    }
    return json.dumps(payload, indent=2) + "\n"


def _run_single(args, as_json: bool) -> int:
    doc = _document(args)
    for key in ("axis", "values", "parallelism"):
        if key in doc:
            raise ConfigError(key, "sweep key passed to a single-point command")
    spec = parse_document(doc)
    record = run_point(spec)
    out, close = _open_out(args.out)
    try:
        if as_json:
            out.write(_report_json(record))
        else:
            emit_csv(record, out)
    finally:
        if close:
            out.close()
    return 0


def _run_sweep(args) -> int:
    doc = _overlay_sweep(_document(args), args)
    if "axis" not in doc:
        raise ConfigError("axis", "required key is missing (use --axis)")
    if "values" not in doc:
        raise ConfigError("values", "required key is missing (use --values)")
    spec = parse_document(doc)
    records = sweep(spec)
    failed = len(spec.values) - len(records)
    if not records:
        print("error: every sweep point failed", file=sys.stderr)
        return 2
    out, close = _open_out(args.out)
    try:
        emit_csv(records, out, axis=spec.axis)
    finally:
        if close:
            out.close()
    if failed:
        print(f"error: {failed} of {len(spec.values)} sweep points failed",
              file=sys.stderr)
        return 2
    return 0


def _document(args) -> dict:
    doc = read_document(args.config) if args.config is not None else {}
    return _overlay(doc, args)


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "echo":
            return _run_single(args, as_json=False)
        if args.command == "measure":
            return _run_single(args, as_json=True)
        return _run_sweep(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PipelineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

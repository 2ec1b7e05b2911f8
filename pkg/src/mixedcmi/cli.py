"""Command-line entry point: ``mixedcmi {estimate,simulate,bench,selftest}``.

Exit codes: 0 success, 1 usage error, 2 data validation error, 3 numeric
failure (including a failed self-test).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from .bench import BenchConfig, export_report, run_bench
from .data import ColumnKind, DataValidationError, Dataset, RoleAssignment, build_dataset
from .estimators import EstimateParams, EstimationError, EstimatorKind, estimate
from .selftest import run_selftest
from .simulators import Scenario, ScenarioSpec, generate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
RESULT_SCHEMA_VERSION = 1
SCHEMA_COMMENT = "# schema:"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _names(values) -> list[str]:
    out = []
    for v in values or []:
        out.extend(s.strip() for s in v.split(",") if s.strip())
    return out


def _kinds(spec: str) -> list[ColumnKind]:
    return [ColumnKind.parse(tok) for tok in spec.split(",") if tok.strip()]


def read_csv(path: str, types: str | None = None) -> Dataset:
    """Read a headed CSV; column kinds come from ``types``, a sidecar
    ``<path>.schema`` file, or a leading ``# schema:`` comment, in that order."""
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    lines = text.splitlines()
    comment = None
    if lines and lines[0].startswith(SCHEMA_COMMENT):
        comment = lines[0][len(SCHEMA_COMMENT):].strip()
        lines = lines[1:]
    if types is None and path != "-":
        sidecar = Path(path + ".schema")
        if sidecar.exists():
            types = sidecar.read_text().strip().splitlines()[0]
    if types is None:
        types = comment
    if types is None:
        raise DataValidationError(
            "column kinds are not declared; pass --types or provide a .schema sidecar"
        )
    rows = list(csv.reader(lines))
    if not rows:
        raise DataValidationError("empty CSV")
    header, body = rows[0], [r for r in rows[1:] if r]
    kinds = _kinds(types)
    if len(kinds) != len(header):
        raise DataValidationError(
            f"{len(kinds)} column kinds declared for {len(header)} header columns"
        )
    return build_dataset(list(zip(header, kinds)), body)


def _format_cell(ds: Dataset, i: int, j: int) -> str:
    value = ds.cell(i, j)
    if isinstance(value, str):
        return value
    if ds.columns[j].kind is ColumnKind.DISCRETE and value.is_integer():
        return str(int(value))
    return repr(value)


def write_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    buf.write(f"{SCHEMA_COMMENT} {','.join(k.value for k in ds.kinds)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ds.names)
    for i in range(ds.n):
        writer.writerow([_format_cell(ds, i, j) for j in range(ds.d)])
    return buf.getvalue()


def _emit(data, output: str | None, binary: bool = False):
    if output in (None, "-"):
        if binary:
            sys.stdout.write(data.decode())
        else:
            sys.stdout.write(data)
        sys.stdout.flush()
    else:
        Path(output).write_bytes(data if binary else data.encode())


def cmd_estimate(args) -> int:
    kind = EstimatorKind.parse(args.estimator)
    ds = read_csv(args.input, args.types)
    roles = None
    if kind is not EstimatorKind.KL_ENTROPY:
        x, y, z = _names(args.x), _names(args.y), _names(args.z)
        if not x or not y:
            raise UsageError("--x and --y are required")
        roles = RoleAssignment.from_names(ds, x, y, z)
    else:
        cols = _names(args.x) + _names(args.y) + _names(args.z)
        if cols:
            ds = ds.project([ds.index_of(c) for c in cols])
    params = EstimateParams(k=args.k, clamp=args.clamp, p_norm=args.p_norm, method=args.method)
    result = estimate(ds, roles, kind, params)
    nats = float(result.estimate)
    value = nats / math.log(2.0) if args.bits else nats
    payload = {
        "schema_version": RESULT_SCHEMA_VERSION,
        "estimate": value,
        "units": "bits" if args.bits else "nats",
        "nats": nats,
        "estimator": kind.value,
        "k": params.k,
        "n": result.n,
        "clamped": result.clamped,
    }
    print(json.dumps(payload))
    return EXIT_OK


def cmd_simulate(args) -> int:
    ds, _ = generate(ScenarioSpec(Scenario.parse(args.scenario), args.n, args.seed))
    _emit(write_csv(ds), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = BenchConfig(
        scenarios=tuple(Scenario.parse(s) for s in _names(args.scenarios)) or tuple(Scenario),
        estimators=tuple(EstimatorKind.parse(e) for e in _names(args.estimators))
        or BenchConfig.estimators,
        n_grid=tuple(args.n_grid) if args.n_grid else BenchConfig.n_grid,
        replications=args.reps,
        k=args.k,
        base_seed=args.seed,
        clamp=args.clamp,
    )
    report = run_bench(config, workers=args.workers)
    _emit(export_report(report, args.format), args.output, binary=True)
    failed = [c for c in report.cells if c.error]
    for c in failed:
        print(f"cell {c.scenario.value}/{c.estimator.value}/n={c.n} failed: {c.error}",
              file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args) -> int:
    return EXIT_OK if run_selftest() else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixedcmi", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    est = sub.add_parser("estimate", help="estimate CMI/MI (or KL entropy) from a CSV file")
    est.add_argument("input", help="CSV path with a header row, or - for stdin")
    est.add_argument("--types", help="comma-separated column kinds: cont, disc, cat")
    est.add_argument("--x", action="append", help="X column names (comma-separated or repeated)")
    est.add_argument("--y", action="append", help="Y column names")
    est.add_argument("--z", action="append", help="Z column names (omit for MI)")
    est.add_argument("--k", type=int, default=7)
    est.add_argument("--estimator", default="proposed",
                     help="proposed, fp, ravk1, ravk2, ksg or kl (default proposed)")
    est.add_argument("--clamp", action=argparse.BooleanOptionalAction, default=True,
                     help="report max(estimate, 0) (default on)")
    est.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    est.add_argument("--p-norm", type=float, default=math.inf, help="l_p norm for kl")
    est.add_argument("--method", choices=("brute", "tree"), default="brute")
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser("simulate", help="write a simulated scenario dataset as CSV")
    sim.add_argument("scenario", help=", ".join(s.value for s in Scenario) + " (or 1-4)")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--output", "-o")
    sim.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("bench", help="run the replicated simulation grid")
    bench.add_argument("--scenarios", action="append", help="scenario ids (default all)")
    bench.add_argument("--estimators", action="append",
                       help="estimators (default proposed,fp,ravk1,ravk2)")
    bench.add_argument("--n-grid", type=int, nargs="+", help="sample sizes (default 100..1000)")
    bench.add_argument("--reps", type=int, default=100)
    bench.add_argument("--k", type=int, default=7)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--clamp", action=argparse.BooleanOptionalAction, default=False,
                       help="clamp replicate estimates at 0 (default off)")
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--output", "-o")
    bench.add_argument("--workers", type=int, default=None, help="worker processes")
    bench.set_defaults(func=cmd_bench)

    st = sub.add_parser("selftest", help="run the fast invariant checks")
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mixedcmi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataValidationError, KeyError, FileNotFoundError) as exc:
        print(f"mixedcmi: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (EstimationError, FloatingPointError) as exc:
        print(f"mixedcmi: estimation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"mixedcmi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

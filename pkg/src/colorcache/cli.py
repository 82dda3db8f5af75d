"""Command-line front end.

Subcommands: ``gen-trace`` writes a synthetic trace file, ``run`` simulates
a config under one or more policies, ``compare`` tabulates runs against a
baseline report, and ``report`` validates and summarizes a report file.

Exit codes: 0 on success, 1 for usage errors, 2 for runtime failures
(bad config, malformed trace, simulation errors).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema

from .config import POLICIES, ConfigError, load_config
from .report import (
    RunReport,
    compare_reports,
    render_comparison_table,
    summarize_report,
    validate_report,
    write_intervals_csv,
)
from .runner import run_config
from .workload import SYNTHETIC_KINDS, SyntheticParams, TraceFormatError, gen_synthetic, write_trace


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for runtime errors
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="colorcache", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen-trace", help="write a synthetic trace file")
    gen.add_argument("--kind", required=True, choices=SYNTHETIC_KINDS)
    gen.add_argument("--length", required=True, type=int, help="number of records")
    gen.add_argument("--working-set", type=int, default=1 << 20, help="bytes (default 1 MiB)")
    gen.add_argument("--stride", type=int, default=64)
    gen.add_argument("--instr-per-access", type=int, default=10)
    gen.add_argument("--store-fraction", type=float, default=0.0)
    gen.add_argument("--phase-length", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--format", choices=("auto", "text", "binary"), default="auto")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen_trace)

    run = sub.add_parser("run", help="simulate a config under one or more policies")
    run.add_argument("--config", required=True)
    run.add_argument("--policy", action="append", choices=POLICIES,
                     help="repeatable; default: ours")
    run.add_argument("--out", required=True,
                     help="report file for one policy, directory for several")
    run.add_argument("--jobs", type=int, default=1, help="parallel runs")
    run.set_defaults(func=_cmd_run)

    cmp_ = sub.add_parser("compare", help="tabulate runs against a baseline report")
    cmp_.add_argument("--baseline", required=True)
    cmp_.add_argument("--run", action="append", required=True, help="repeatable")
    cmp_.add_argument("--out", help="also write the comparison as JSON")
    cmp_.set_defaults(func=_cmd_compare)

    rep = sub.add_parser("report", help="validate and summarize a report file")
    rep.add_argument("report")
    rep.add_argument("--csv", help="also write per-interval rows as CSV")
    rep.set_defaults(func=_cmd_report)

    return parser


def _cmd_gen_trace(args: argparse.Namespace) -> int:
    params = SyntheticParams(
        length=args.length,
        working_set=args.working_set,
        stride=args.stride,
        instr_per_access=args.instr_per_access,
        store_fraction=args.store_fraction,
        phase_length=args.phase_length,
    )
    records = gen_synthetic(args.kind, params, args.seed)
    count = write_trace(records, args.out, args.format)
    print(f"wrote {count} records to {args.out}")
    return 0


def _run_one(config_path: str, policy: str, out_path: str) -> tuple[str, float, float, int, str]:
    cfg = load_config(config_path)
    report = run_config(cfg, policy)
    report.save(out_path)
    totals = report.totals
    return policy, report.energy["total"], totals["time_s"], report.final_colors, out_path


def _cmd_run(args: argparse.Namespace) -> int:
    policies = args.policy or ["ours"]
    if len(set(policies)) != len(policies):
        raise ValueError("each policy may be given only once")
    load_config(args.config)  # fail fast before any worker starts
    out = Path(args.out)
    if len(policies) == 1 and out.suffix == ".json":
        out_paths = [out]
        out.parent.mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)
        out_paths = [out / f"{p}.json" for p in policies]
    jobs = [(args.config, p, str(o)) for p, o in zip(policies, out_paths)]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, *zip(*jobs)))
    else:
        results = [_run_one(*job) for job in jobs]
    for policy, energy, time_s, colors, path in results:
        print(f"{policy:<9} energy {energy:.6g} J  time {time_s:.6g} s  colors {colors}  -> {path}")
    return 0


def _load_report_doc(path: str) -> dict:
    with open(path) as f:
        doc = json.load(f)
    validate_report(doc)
    return doc


def _cmd_compare(args: argparse.Namespace) -> int:
    baseline = _load_report_doc(args.baseline)
    runs = [_load_report_doc(p) for p in args.run]
    cmp_doc = compare_reports(baseline, runs)
    print(render_comparison_table(cmp_doc))
    if args.out:
        with open(args.out, "w") as f:
            json.dump(cmp_doc, f, indent=1)
            f.write("\n")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    doc = _load_report_doc(args.report)
    print(summarize_report(doc))
    if args.csv:
        write_intervals_csv(doc, args.csv)
        print(f"intervals written to {args.csv}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TraceFormatError, jsonschema.ValidationError) as exc:
        print(f"colorcache: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"colorcache: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

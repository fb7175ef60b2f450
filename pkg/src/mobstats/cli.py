"""Command line entry point.

Subcommands: run (full pipeline), generate (synthetic scenario),
compare (join two stats files), config-dump (print effective defaults).
Flags mirror the pipeline configuration one-to-one in kebab-case; a JSON
config file may supply the same keys, with explicit flags winning. Exit
codes: 0 ok, 1 config error, 2 IO error, 3 data error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys

from .errors import ConfigError, DataError
from .pipeline import PipelineConfig, compare_stats, run, write_compare
from .synth import STYLES, ScenarioSpec, generate

CONFIG_DEFAULTS = {
    "inputs": [],
    "gazetteer": None,
    "output_dir": "out",
    "format": "both",
    "accuracy_max_m": 50.0,
    "min_reports": 10,
    "min_span_hours": 8.0,
    "trim_fraction": 0.10,
    "baseline_start": "2020-02-17",
    "baseline_end": "2020-03-07",
    "date_start": None,
    "date_end": None,
    "workers": 1,
    "n_buckets": 8,
    "scratch_dir": None,
    "verbose_stats": False,
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as config errors (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ConfigError(f"invalid date {text!r}, expected yyyy-mm-dd") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="mobstats", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the pipeline over one or more datasets")
    p_run.add_argument("--input", action="append", metavar="GLOB",
                       help="input shard glob; repeat for multiple datasets")
    p_run.add_argument("--gazetteer", metavar="PATH")
    p_run.add_argument("--output-dir", metavar="DIR")
    p_run.add_argument("--format", choices=["ndjson", "csv", "both"])
    p_run.add_argument("--accuracy-max-m", type=float)
    p_run.add_argument("--min-reports", type=int)
    p_run.add_argument("--min-span-hours", type=float)
    p_run.add_argument("--trim-fraction", type=float)
    p_run.add_argument("--baseline-start", metavar="DATE")
    p_run.add_argument("--baseline-end", metavar="DATE")
    p_run.add_argument("--date-start", metavar="DATE")
    p_run.add_argument("--date-end", metavar="DATE")
    p_run.add_argument("--workers", type=int)
    p_run.add_argument("--n-buckets", type=int)
    p_run.add_argument("--scratch-dir", metavar="DIR")
    p_run.add_argument("--verbose-stats", action="store_const", const=True, default=None)
    p_run.add_argument("--config", metavar="FILE", help="JSON config file; flags override")

    p_gen = sub.add_parser("generate", help="write a synthetic scenario with truth sidecar")
    p_gen.add_argument("--out-dir", required=True, metavar="DIR")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--devices", type=int, default=48)
    p_gen.add_argument("--start-date", default="2020-02-17", metavar="DATE")
    p_gen.add_argument("--end-date", default="2020-03-13", metavar="DATE")
    p_gen.add_argument("--base-mobility-km", type=float, default=5.2)
    p_gen.add_argument("--scale", type=float, default=1.0,
                       help="mobility scale factor applied from --scale-start onward")
    p_gen.add_argument("--scale-start", default="2020-03-09", metavar="DATE")
    p_gen.add_argument("--styles", default="planned",
                       help=f"comma list from {','.join(STYLES)}")
    p_gen.add_argument("--reports-min", type=int, default=12)
    p_gen.add_argument("--reports-max", type=int, default=24)
    p_gen.add_argument("--accuracy-reject-fraction", type=float, default=0.0)
    p_gen.add_argument("--malformed-fraction", type=float, default=0.0)
    p_gen.add_argument("--ineligible-fraction", type=float, default=0.0)
    p_gen.add_argument("--shards", type=int, default=4)
    p_gen.add_argument("--gzip", action="store_true")

    p_cmp = sub.add_parser("compare", help="join two stats.ndjson files on region and date")
    p_cmp.add_argument("stats_a", metavar="A.ndjson")
    p_cmp.add_argument("stats_b", metavar="B.ndjson")
    p_cmp.add_argument("--out", metavar="FILE", help="write NDJSON here instead of stdout")

    sub.add_parser("config-dump", help="print the effective default configuration")
    return parser


def _merged_run_config(args: argparse.Namespace) -> PipelineConfig:
    merged = dict(CONFIG_DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {args.config}: {e}") from None
        unknown = set(file_cfg) - set(CONFIG_DEFAULTS)
        if unknown:
            raise ConfigError(f"config file {args.config}: unknown keys {sorted(unknown)}")
        merged.update(file_cfg)
    for key in CONFIG_DEFAULTS:
        if key == "inputs":
            if args.input is not None:
                merged["inputs"] = args.input
            continue
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    dates = {
        k: _parse_date(merged[k]) if isinstance(merged[k], str) else merged[k]
        for k in ("baseline_start", "baseline_end", "date_start", "date_end")
    }
    return PipelineConfig(
        inputs=list(merged["inputs"]),
        gazetteer=merged["gazetteer"],
        output_dir=merged["output_dir"],
        format=merged["format"],
        accuracy_max_m=float(merged["accuracy_max_m"]),
        min_reports=int(merged["min_reports"]),
        min_span_hours=float(merged["min_span_hours"]),
        trim_fraction=float(merged["trim_fraction"]),
        baseline_start=dates["baseline_start"],
        baseline_end=dates["baseline_end"],
        date_start=dates["date_start"],
        date_end=dates["date_end"],
        workers=int(merged["workers"]),
        n_buckets=int(merged["n_buckets"]),
        scratch_dir=merged["scratch_dir"],
        verbose_stats=bool(merged["verbose_stats"]),
    )


def _cmd_run(args: argparse.Namespace) -> int:
    reports = run(_merged_run_config(args))
    for r in reports:
        print(json.dumps(r, separators=(",", ":")))
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    styles = tuple(s.strip() for s in args.styles.split(",") if s.strip())
    bad = [s for s in styles if s not in STYLES]
    if bad:
        raise ConfigError(f"unknown styles {bad}; choose from {STYLES}")
    start = _parse_date(args.start_date)
    end = _parse_date(args.end_date)
    if start > end:
        raise ConfigError(f"date range is empty: {start} > {end}")
    scale_start = _parse_date(args.scale_start)
    overrides = {}
    if args.scale != 1.0:
        d = max(scale_start, start)
        while d <= end:
            overrides[d] = args.scale
            d += dt.timedelta(days=1)
    spec = ScenarioSpec(
        seed=args.seed,
        devices=args.devices,
        start_date=start,
        end_date=end,
        base_mobility_km=args.base_mobility_km,
        scale_overrides=overrides,
        styles=styles,
        reports_min=args.reports_min,
        reports_max=args.reports_max,
        accuracy_reject_fraction=args.accuracy_reject_fraction,
        malformed_fraction=args.malformed_fraction,
        ineligible_fraction=args.ineligible_fraction,
        shards=args.shards,
        gzip_shards=args.gzip,
    )
    summary = generate(spec, args.out_dir)
    print(json.dumps(summary, separators=(",", ":")))
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    rows = compare_stats(args.stats_a, args.stats_b)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_compare(rows, fh)
    else:
        write_compare(rows, sys.stdout)
    return 0


def _cmd_config_dump() -> int:
    print(json.dumps(CONFIG_DEFAULTS, indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_config_dump()
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: io: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"error: data: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

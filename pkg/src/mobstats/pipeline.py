"""End-to-end batch pipeline: scatter, gather, reduce, index, serialize.

Stages communicate through spill files under a scratch directory. The
scatter phase partitions each input shard into per-(bucket, shard) spill
files; the gather phase turns one bucket at a time into per-device-day
metric records; the parent process reduces those into per-(region, date)
statistics and writes the outputs atomically. Spill files are keyed by
input shard index and read back in shard order, region-day sample lists
are value-sorted before any arithmetic, and every output file is written
in one canonical order, so results are byte-identical for any worker or
bucket count. Scratch files are deleted on success and kept on failure.
"""

from __future__ import annotations

import datetime as dt
import glob as globmod
import json
import multiprocessing as mp
import os
import shutil
from dataclasses import dataclass, field

from . import aggregate, output
from .collate import bucket_index, date_to_day_number, day_number_to_date, local_day_number
from .errors import ConfigError
from .geo import GeoPoint, solar_tz_offset_hours
from .geocode import Gazetteer, RegionKey, load_gazetteer, reverse_geocode
from .ingest import IngestStats, iter_shard_raw
from .metrics import day_box_and_hull, day_max_distance

FORMATS = ("ndjson", "csv", "both")

DEFAULT_BASELINE_START = aggregate.DEFAULT_BASELINE_START
DEFAULT_BASELINE_END = aggregate.DEFAULT_BASELINE_END


@dataclass
class PipelineConfig:
    inputs: list[str] = field(default_factory=list)  # one glob pattern per dataset
    gazetteer: str | None = None
    output_dir: str = "out"
    format: str = "both"
    accuracy_max_m: float = 50.0
    min_reports: int = 10
    min_span_hours: float = 8.0
    trim_fraction: float = 0.10
    baseline_start: dt.date = DEFAULT_BASELINE_START
    baseline_end: dt.date = DEFAULT_BASELINE_END
    date_start: dt.date | None = None
    date_end: dt.date | None = None
    workers: int = 1
    n_buckets: int = 8
    scratch_dir: str | None = None
    verbose_stats: bool = False

    def validate(self) -> None:
        if not self.inputs:
            raise ConfigError("no input globs given")
        if not self.gazetteer:
            raise ConfigError("no gazetteer path given")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.accuracy_max_m <= 0:
            raise ConfigError(f"accuracy_max_m must be positive, got {self.accuracy_max_m}")
        if self.min_reports < 1:
            raise ConfigError(f"min_reports must be >= 1, got {self.min_reports}")
        if self.min_span_hours < 0:
            raise ConfigError(f"min_span_hours must be >= 0, got {self.min_span_hours}")
        if not 0.0 <= self.trim_fraction < 1.0:
            raise ConfigError(f"trim_fraction must be in [0, 1), got {self.trim_fraction}")
        if self.baseline_start > self.baseline_end:
            raise ConfigError(
                f"baseline window is empty: {self.baseline_start} > {self.baseline_end}"
            )
        if self.date_start and self.date_end and self.date_start > self.date_end:
            raise ConfigError(f"date range is empty: {self.date_start} > {self.date_end}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.n_buckets < 1:
            raise ConfigError(f"n_buckets must be >= 1, got {self.n_buckets}")


# gazetteer shared with forked gather workers
_GAZ: Gazetteer | None = None


def _spill_path(scratch: str, bucket: int, shard: int) -> str:
    return os.path.join(scratch, f"spill-{bucket:04d}-{shard:05d}.csv")


def _metrics_path(scratch: str, bucket: int) -> str:
    return os.path.join(scratch, f"metrics-{bucket:04d}.ndjson")


def _scatter_shard(task: tuple) -> dict:
    """Partition one input shard into per-bucket spill files.

    Spill rows reuse the ingest wire format plus a trailing
    tz_offset_hours column.
    """
    shard_idx, path, n_buckets, accuracy_max_m, scratch = task
    stats = IngestStats()
    writers: dict[int, object] = {}
    try:
        for device_id, epoch, lat, lon, acc in iter_shard_raw(path, accuracy_max_m, stats):
            b = bucket_index(device_id, n_buckets)
            w = writers.get(b)
            if w is None:
                w = open(_spill_path(scratch, b, shard_idx), "w", encoding="utf-8", newline="\n")
                writers[b] = w
            tz = solar_tz_offset_hours(lon)
            w.write(f"{device_id},{epoch},{lat!r},{lon!r},{acc!r},{tz}\n")
    finally:
        for w in writers.values():
            w.close()
    return {
        "lines_read": stats.lines_read,
        "lines_malformed": stats.lines_malformed,
        "reports_accepted": stats.reports_accepted,
        "reports_rejected_accuracy": stats.reports_rejected_accuracy,
    }


def _gather_bucket(task: tuple) -> dict:
    """Turn one bucket's spill files into per-device-day metric records."""
    (bucket_idx, spill_paths, metrics_file, min_reports, min_span_hours,
     trim_fraction, day_lo, day_hi) = task
    gaz = _GAZ
    assert gaz is not None, "gazetteer not loaded before gather"

    by_device: dict[str, list[tuple[int, float, float, float]]] = {}
    for path in spill_paths:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split(",")
                by_device.setdefault(parts[0], []).append(
                    (int(parts[1]), float(parts[2]), float(parts[3]), float(parts[4]))
                )

    counters = {
        "device_days": 0,
        "device_day_reports": 0,
        "date_filtered_days": 0,
        "rejected_too_few_reports": 0,
        "rejected_short_span": 0,
        "eligible_device_days": 0,
        "unmatched_geocode": 0,
    }
    min_span_s = min_span_hours * 3600.0

    with open(metrics_file, "w", encoding="utf-8", newline="\n") as out_fh:
        for device_id in sorted(by_device):
            rows = sorted(by_device[device_id])
            tz = solar_tz_offset_hours(rows[0][2])
            days: dict[int, list[tuple[int, float, float, float]]] = {}
            for row in rows:
                days.setdefault(local_day_number(row[0], tz), []).append(row)
            for day_number in sorted(days):
                day_rows = days[day_number]
                counters["device_days"] += 1
                counters["device_day_reports"] += len(day_rows)
                if (day_lo is not None and day_number < day_lo) or (
                    day_hi is not None and day_number > day_hi
                ):
                    counters["date_filtered_days"] += 1
                    continue
                n = len(day_rows)
                if n < min_reports:
                    counters["rejected_too_few_reports"] += 1
                    continue
                if day_rows[-1][0] - day_rows[0][0] < min_span_s:
                    counters["rejected_short_span"] += 1
                    continue
                counters["eligible_device_days"] += 1

                lat0, lon0 = day_rows[0][1], day_rows[0][2]
                region = reverse_geocode(gaz, GeoPoint(lat0, lon0))
                if region is None:
                    counters["unmatched_geocode"] += 1
                    continue

                m_max = day_max_distance(day_rows, trim_fraction)
                m_bb, m_ch, _a_bb, _a_ch = day_box_and_hull(day_rows)

                if region.admin1:
                    a1_id = gaz.admin1_ids.get((region.country_code, region.admin1), "")
                else:
                    a1_id = region.region_id
                rec = {
                    "c": region.country_code,
                    "a1": region.admin1,
                    "a2": region.admin2,
                    "rid": region.region_id,
                    "a1id": a1_id,
                    "d": day_number,
                    "mm": m_max,
                    "mb": m_bb,
                    "mc": m_ch,
                }
                out_fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    return counters


def _map_tasks(fn, tasks: list, workers: int) -> list:
    """Run tasks in order, inline or on a fork pool; results in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    ctx = mp.get_context("fork")
    with ctx.Pool(min(workers, len(tasks))) as pool:
        return pool.map(fn, tasks)


def _atomic_write(path: str, write_fn) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        write_fn(fh)
    os.replace(tmp, path)


def _run_dataset(ds_idx: int, shards: list[str], cfg: PipelineConfig,
                 scratch: str, out_dir: str) -> dict:
    os.makedirs(scratch, exist_ok=True)

    stats = IngestStats()
    scatter_tasks = [
        (s, path, cfg.n_buckets, cfg.accuracy_max_m, scratch)
        for s, path in enumerate(shards)
    ]
    for st in _map_tasks(_scatter_shard, scatter_tasks, cfg.workers):
        stats.merge(IngestStats(**st))

    day_lo = None if cfg.date_start is None else date_to_day_number(cfg.date_start)
    day_hi = None if cfg.date_end is None else date_to_day_number(cfg.date_end)
    gather_tasks = []
    for b in range(cfg.n_buckets):
        spills = [
            _spill_path(scratch, b, s)
            for s in range(len(shards))
            if os.path.exists(_spill_path(scratch, b, s))
        ]
        gather_tasks.append(
            (b, spills, _metrics_path(scratch, b), cfg.min_reports,
             cfg.min_span_hours, cfg.trim_fraction, day_lo, day_hi)
        )
    counters: dict[str, int] = {}
    for c in _map_tasks(_gather_bucket, gather_tasks, cfg.workers):
        for k, v in c.items():
            counters[k] = counters.get(k, 0) + v

    # reduce: expand each matched device-day into its admin1-level key and,
    # when present, its admin2-level key (medians do not compose upward)
    records_stream = []
    for b in range(cfg.n_buckets):
        with open(_metrics_path(scratch, b), encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                date = day_number_to_date(rec["d"])
                triple = (rec["mm"], rec["mb"], rec["mc"])
                records_stream.append(
                    (RegionKey(rec["c"], rec["a1"], "", rec["a1id"]), date, triple)
                )
                if rec["a2"]:
                    records_stream.append(
                        (RegionKey(rec["c"], rec["a1"], rec["a2"], rec["rid"]), date, triple)
                    )

    stats_map = aggregate.reduce_region_day(records_stream)
    baseline = aggregate.compute_baseline(
        stats_map.values(), cfg.baseline_start, cfg.baseline_end
    )
    for s in stats_map.values():
        aggregate.apply_index(s, baseline)
    records = output.sorted_records(
        [output.record_from_stats(s, cfg.verbose_stats) for s in stats_map.values()]
    )

    os.makedirs(out_dir, exist_ok=True)
    if cfg.format in ("ndjson", "both"):
        _atomic_write(
            os.path.join(out_dir, "stats.ndjson"),
            lambda fh: output.write_ndjson(records, fh, cfg.verbose_stats),
        )
    if cfg.format in ("csv", "both"):
        _atomic_write(
            os.path.join(out_dir, "stats.csv"),
            lambda fh: output.write_csv(records, fh, cfg.verbose_stats),
        )

    admin1_samples = sum(r.samples for r in records if r.admin_level == "admin1")
    report = {
        "dataset": ds_idx,
        "shards": len(shards),
        "lines_read": stats.lines_read,
        "lines_malformed": stats.lines_malformed,
        "reports_accepted": stats.reports_accepted,
        "reports_rejected_accuracy": stats.reports_rejected_accuracy,
        "device_days": counters.get("device_days", 0),
        "device_day_reports": counters.get("device_day_reports", 0),
        "date_filtered_days": counters.get("date_filtered_days", 0),
        "rejected_too_few_reports": counters.get("rejected_too_few_reports", 0),
        "rejected_short_span": counters.get("rejected_short_span", 0),
        "eligible_device_days": counters.get("eligible_device_days", 0),
        "unmatched_geocode": counters.get("unmatched_geocode", 0),
        "regions_emitted": len({
            (r.country_code, r.admin_level, r.admin1, r.admin2, r.region_id) for r in records
        }),
        "region_day_rows": len(records),
        "admin1_level_samples": admin1_samples,
    }
    return report


def run(cfg: PipelineConfig) -> list[dict]:
    """Run the full pipeline; returns the run-report record for each dataset.

    Output layout: a single dataset writes stats.ndjson / stats.csv directly
    under output_dir; multiple datasets write under dataset-NN/ plus a
    compare.ndjson when there are exactly two. run_report.ndjson collects
    one line of deterministic counters per dataset.
    """
    cfg.validate()
    datasets: list[list[str]] = []
    for pattern in cfg.inputs:
        shards = sorted(globmod.glob(pattern))
        if not shards:
            raise ConfigError(f"no input files match {pattern!r}")
        datasets.append(shards)

    global _GAZ
    gaz = load_gazetteer(cfg.gazetteer)
    _GAZ = gaz

    os.makedirs(cfg.output_dir, exist_ok=True)
    scratch_base = cfg.scratch_dir or os.path.join(cfg.output_dir, ".scratch")
    spill_root = os.path.join(scratch_base, "spill")

    reports: list[dict] = []
    ok = False
    try:
        for i, shards in enumerate(datasets):
            out_dir = (
                cfg.output_dir
                if len(datasets) == 1
                else os.path.join(cfg.output_dir, f"dataset-{i:02d}")
            )
            scratch = os.path.join(spill_root, f"ds{i:02d}")
            reports.append(_run_dataset(i, shards, cfg, scratch, out_dir))

        _atomic_write(
            os.path.join(cfg.output_dir, "run_report.ndjson"),
            lambda fh: fh.writelines(
                json.dumps(r, separators=(",", ":")) + "\n" for r in reports
            ),
        )

        if len(datasets) == 2 and cfg.format in ("ndjson", "both"):
            rows = compare_stats(
                os.path.join(cfg.output_dir, "dataset-00", "stats.ndjson"),
                os.path.join(cfg.output_dir, "dataset-01", "stats.ndjson"),
            )
            _atomic_write(
                os.path.join(cfg.output_dir, "compare.ndjson"),
                lambda fh: write_compare(rows, fh),
            )
        ok = True
    finally:
        if ok:
            shutil.rmtree(spill_root, ignore_errors=True)
    return reports


def compare_stats(path_a: str, path_b: str) -> list[dict]:
    """Join two stats files on region and date; delta = index_b - index_a.

    Rows missing on either side, or missing an index, carry a null delta;
    status says which side(s) the key appeared on.
    """
    a = {_join_key(r): r for r in output.read_ndjson(path_a)}
    b = {_join_key(r): r for r in output.read_ndjson(path_b)}
    rows = []
    for key in sorted(set(a) | set(b)):
        ra, rb = a.get(key), b.get(key)
        status = "both" if ra and rb else ("only_a" if ra else "only_b")
        idx_a = ra.m50_index if ra else None
        idx_b = rb.m50_index if rb else None
        delta = idx_b - idx_a if idx_a is not None and idx_b is not None else None
        rows.append(
            {
                "country_code": key[0],
                "admin_level": key[1],
                "admin1": key[2],
                "admin2": key[3],
                "region_id": key[4],
                "date": key[5],
                "m50_index_a": idx_a,
                "m50_index_b": idx_b,
                "delta": delta,
                "status": status,
            }
        )
    return rows


def _join_key(r: output.OutputRecord) -> tuple:
    return (r.country_code, r.admin_level, r.admin1, r.admin2, r.region_id, r.date)


def write_compare(rows: list[dict], sink) -> None:
    for row in rows:
        parts = [
            f'"country_code":{json.dumps(row["country_code"])}',
            f'"admin_level":{json.dumps(row["admin_level"])}',
            f'"admin1":{json.dumps(row["admin1"])}',
            f'"admin2":{json.dumps(row["admin2"])}',
            f'"region_id":{json.dumps(row["region_id"])}',
            f'"date":{json.dumps(row["date"])}',
            f'"m50_index_a":{_fmt_nullable(row["m50_index_a"])}',
            f'"m50_index_b":{_fmt_nullable(row["m50_index_b"])}',
            f'"delta":{_fmt_nullable(row["delta"])}',
            f'"status":{json.dumps(row["status"])}',
        ]
        sink.write("{" + ",".join(parts) + "}\n")


def _fmt_nullable(x: float | None) -> str:
    return "null" if x is None else f"{x:.1f}"

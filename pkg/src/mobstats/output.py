"""Serialization of region-day statistics to NDJSON and CSV.

Both formats carry identical values: m50 fixed to 3 decimals, m50_index to
1 decimal (JSON null / empty CSV cell when absent). Records are written in
a canonical sort order with a fixed key order, so identical inputs always
produce byte-identical files. UTF-8, LF line endings.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .aggregate import RegionDayStats
from .errors import DataError

CSV_HEADER = [
    "country_code",
    "admin_level",
    "admin1",
    "admin2",
    "region_id",
    "date",
    "samples",
    "m50",
    "m50_index",
]
VERBOSE_EXTRA = ["m_max_mean", "m_max_q1", "m_max_q3"]


@dataclass(frozen=True, slots=True)
class OutputRecord:
    country_code: str
    admin_level: str  # "admin1" | "admin2"
    admin1: str
    admin2: str
    region_id: str
    date: str  # yyyy-mm-dd
    samples: int
    m50: float
    m50_index: float | None
    m_max_mean: float | None = None
    m_max_q1: float | None = None
    m_max_q3: float | None = None

    def sort_key(self) -> tuple:
        return (self.country_code, self.admin1, self.admin2, self.date,
                self.admin_level, self.region_id)


def record_from_stats(stats: RegionDayStats, verbose: bool = False) -> OutputRecord:
    region = stats.region
    level = "admin2" if region.admin2 else "admin1"
    return OutputRecord(
        country_code=region.country_code,
        admin_level=level,
        admin1=region.admin1,
        admin2=region.admin2,
        region_id=region.region_id,
        date=stats.date.isoformat(),
        samples=stats.samples,
        m50=stats.m50,
        m50_index=stats.m50_index,
        m_max_mean=stats.m_max.mean if verbose else None,
        m_max_q1=stats.m_max.q1 if verbose else None,
        m_max_q3=stats.m_max.q3 if verbose else None,
    )


def _fmt3(x: float) -> str:
    return f"{x:.3f}"


def _fmt1(x: float | None) -> str | None:
    return None if x is None else f"{x:.1f}"


def write_ndjson(records: Iterable[OutputRecord], sink: IO[str], verbose: bool = False) -> None:
    """One JSON object per record, LF-terminated, keys in schema order."""
    for r in records:
        parts = [
            f'"country_code":{json.dumps(r.country_code)}',
            f'"admin_level":{json.dumps(r.admin_level)}',
            f'"admin1":{json.dumps(r.admin1)}',
            f'"admin2":{json.dumps(r.admin2)}',
            f'"region_id":{json.dumps(r.region_id)}',
            f'"date":{json.dumps(r.date)}',
            f'"samples":{r.samples}',
            f'"m50":{_fmt3(r.m50)}',
            f'"m50_index":{_fmt1(r.m50_index) or "null"}',
        ]
        if verbose:
            parts += [
                f'"m_max_mean":{_fmt3(r.m_max_mean)}',
                f'"m_max_q1":{_fmt3(r.m_max_q1)}',
                f'"m_max_q3":{_fmt3(r.m_max_q3)}',
            ]
        sink.write("{" + ",".join(parts) + "}\n")


def write_csv(records: Iterable[OutputRecord], sink: IO[str], verbose: bool = False) -> None:
    """Header plus one row per record, RFC-4180 quoting, LF line endings."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADER + (VERBOSE_EXTRA if verbose else []))
    for r in records:
        row = [
            r.country_code,
            r.admin_level,
            r.admin1,
            r.admin2,
            r.region_id,
            r.date,
            str(r.samples),
            _fmt3(r.m50),
            _fmt1(r.m50_index) or "",
        ]
        if verbose:
            row += [_fmt3(r.m_max_mean), _fmt3(r.m_max_q1), _fmt3(r.m_max_q3)]
        writer.writerow(row)


def read_ndjson(path: str) -> list[OutputRecord]:
    """Parse a stats NDJSON file back into records; raises DataError on bad schema."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON: {e}") from None
            missing = [k for k in CSV_HEADER if k not in obj]
            if missing:
                raise DataError(f"{path}:{lineno}: missing fields {missing}")
            records.append(
                OutputRecord(
                    country_code=obj["country_code"],
                    admin_level=obj["admin_level"],
                    admin1=obj["admin1"],
                    admin2=obj["admin2"],
                    region_id=obj["region_id"],
                    date=obj["date"],
                    samples=int(obj["samples"]),
                    m50=float(obj["m50"]),
                    m50_index=None if obj["m50_index"] is None else float(obj["m50_index"]),
                    m_max_mean=_opt_float(obj.get("m_max_mean")),
                    m_max_q1=_opt_float(obj.get("m_max_q1")),
                    m_max_q3=_opt_float(obj.get("m_max_q3")),
                )
            )
    return records


def _opt_float(x) -> float | None:
    return None if x is None else float(x)


def read_csv(path: str) -> list[OutputRecord]:
    """Parse a stats CSV file back into records (RFC-4180)."""
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[: len(CSV_HEADER)] != CSV_HEADER:
            raise DataError(f"{path}: unexpected CSV header {header!r}")
        verbose = header == CSV_HEADER + VERBOSE_EXTRA
        for row in reader:
            rec = dict(zip(header, row))
            records.append(
                OutputRecord(
                    country_code=rec["country_code"],
                    admin_level=rec["admin_level"],
                    admin1=rec["admin1"],
                    admin2=rec["admin2"],
                    region_id=rec["region_id"],
                    date=rec["date"],
                    samples=int(rec["samples"]),
                    m50=float(rec["m50"]),
                    m50_index=float(rec["m50_index"]) if rec["m50_index"] else None,
                    m_max_mean=_opt_float(rec.get("m_max_mean")) if verbose else None,
                    m_max_q1=_opt_float(rec.get("m_max_q1")) if verbose else None,
                    m_max_q3=_opt_float(rec.get("m_max_q3")) if verbose else None,
                )
            )
    return records


def sorted_records(records: Sequence[OutputRecord]) -> list[OutputRecord]:
    return sorted(records, key=OutputRecord.sort_key)

"""Reading raw position-report shards.

Wire format: UTF-8 text, LF or CRLF line endings, one record per line as
``device_id,epoch_s,lat,lon,accuracy_m`` with no quoting. A ``.gz`` suffix
means the shard is gzip-compressed. A first line whose second field is not
an integer is treated as a vendor header and skipped silently.
"""

from __future__ import annotations

import gzip
import io
import logging
from dataclasses import dataclass
from itertools import chain
from typing import IO, Iterator

from .geo import GeoPoint

log = logging.getLogger(__name__)

DEFAULT_ACCURACY_MAX_M = 50.0

# internal row shape used throughout the pipeline: (device_id, epoch_s, lat, lon, accuracy_m)
RawReport = tuple[str, int, float, float, float]


@dataclass(frozen=True, slots=True)
class PositionReport:
    """One validated position report."""

    device_id: str
    epoch_s: int
    point: GeoPoint
    accuracy_m: float


@dataclass(frozen=True, slots=True)
class Malformed:
    """Verdict for a line that failed validation, with the reason."""

    reason: str


@dataclass(slots=True)
class IngestStats:
    """Per-shard line accounting; every input line lands in exactly one bucket."""

    lines_read: int = 0
    lines_malformed: int = 0
    reports_accepted: int = 0
    reports_rejected_accuracy: int = 0

    def merge(self, other: "IngestStats") -> None:
        self.lines_read += other.lines_read
        self.lines_malformed += other.lines_malformed
        self.reports_accepted += other.reports_accepted
        self.reports_rejected_accuracy += other.reports_rejected_accuracy


def parse_fields(line: str) -> RawReport | str:
    """Parse one record into a raw tuple, or return the failure reason."""
    parts = line.rstrip("\r\n").split(",")
    if len(parts) != 5:
        return "field_count"
    device_id = parts[0]
    if not device_id:
        return "empty_device_id"
    try:
        epoch = int(parts[1])
    except ValueError:
        return "bad_epoch"
    if epoch < 0:
        return "negative_epoch"
    try:
        lat = float(parts[2])
        lon = float(parts[3])
        acc = float(parts[4])
    except ValueError:
        return "bad_number"
    # the comparisons also reject nan/inf
    if not -90.0 <= lat <= 90.0:
        return "lat_range"
    if not -180.0 <= lon <= 180.0:
        return "lon_range"
    if lon == 180.0:
        lon = -180.0
    if not 0.0 <= acc < float("inf"):
        return "bad_accuracy"
    return device_id, epoch, lat, lon, acc


def parse_report_line(line: str) -> PositionReport | Malformed:
    """Parse and fully validate one input line."""
    row = parse_fields(line)
    if isinstance(row, str):
        return Malformed(row)
    device_id, epoch, lat, lon, acc = row
    return PositionReport(device_id, epoch, GeoPoint(lat, lon), acc)


def accuracy_filter(report: PositionReport, threshold_m: float = DEFAULT_ACCURACY_MAX_M) -> bool:
    """True iff the report passes the accuracy filter (boundary inclusive)."""
    return report.accuracy_m <= threshold_m


def open_shard_text(path: str) -> IO[str]:
    """Open a shard for reading, transparently decompressing ``.gz`` files."""
    if str(path).endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, "r", encoding="utf-8", newline="")


def _looks_like_header(line: str) -> bool:
    parts = line.rstrip("\r\n").split(",")
    if len(parts) < 2:
        return True
    try:
        int(parts[1])
    except ValueError:
        return True
    return False


def iter_shard_raw(path: str, accuracy_max_m: float, stats: IngestStats) -> Iterator[RawReport]:
    """Yield accepted raw report tuples from one shard, updating stats in place.

    A leading header line is skipped before any counting. IO and
    decompression failures propagate to the caller; malformed data lines
    never raise.
    """
    with open_shard_text(path) as fh:
        first = fh.readline()
        if not first:
            return
        lines = iter(fh) if _looks_like_header(first) else chain([first], fh)
        for line in lines:
            stats.lines_read += 1
            row = parse_fields(line)
            if isinstance(row, str):
                stats.lines_malformed += 1
                log.debug("malformed line in %s: %s", path, row)
                continue
            if row[4] > accuracy_max_m:
                stats.reports_rejected_accuracy += 1
                continue
            stats.reports_accepted += 1
            yield row


def read_shard(
    path: str,
    accuracy_max_m: float = DEFAULT_ACCURACY_MAX_M,
    stats: IngestStats | None = None,
) -> Iterator[PositionReport]:
    """Yield accepted PositionReports from one shard in file order.

    Pass an IngestStats to receive line accounting; it is complete once the
    iterator is exhausted.
    """
    if stats is None:
        stats = IngestStats()
    for device_id, epoch, lat, lon, acc in iter_shard_raw(path, accuracy_max_m, stats):
        yield PositionReport(device_id, epoch, GeoPoint(lat, lon), acc)

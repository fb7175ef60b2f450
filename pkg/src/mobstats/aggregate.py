"""Reduction of device-day metrics into per-(region, date) statistics.

m50 is the median across a region-date's eligible device-days of the
trimmed max-distance measure; m50_index = 100 * m50 / m50_norm, where
m50_norm is the region's median weekday m50 inside the baseline window.
Quartiles use linear interpolation at p * (n - 1) between order
statistics. Sample lists are value-sorted before any arithmetic so
results do not depend on arrival order.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .geocode import RegionKey
from .metrics import MobilityMetrics

DEFAULT_BASELINE_START = dt.date(2020, 2, 17)
DEFAULT_BASELINE_END = dt.date(2020, 3, 7)

MetricTriple = tuple[float, float, float]  # (m_max, m_bb, m_ch)


@dataclass(frozen=True, slots=True)
class MetricStats:
    mean: float
    median: float
    q1: float
    q3: float


@dataclass(slots=True)
class RegionDayStats:
    region: RegionKey
    date: dt.date
    samples: int
    m_max: MetricStats
    m_bb: MetricStats
    m_ch: MetricStats
    m50: float
    m50_index: float | None = None
    pct_change: float | None = None


def summarize(values_sorted: np.ndarray) -> MetricStats:
    """Mean, median and quartiles of an ascending-sorted sample array."""
    q1, median, q3 = np.quantile(values_sorted, (0.25, 0.5, 0.75))
    return MetricStats(float(values_sorted.mean()), float(median), float(q1), float(q3))


def reduce_region_day(
    records: Iterable[tuple[RegionKey, dt.date, MobilityMetrics | MetricTriple]],
) -> dict[tuple[RegionKey, dt.date], RegionDayStats]:
    """Group device-day metrics by (region, date) and compute exact statistics.

    Order independent: the same multiset of records yields identical output
    however the stream is shuffled.
    """
    groups: dict[tuple[RegionKey, dt.date], list[MetricTriple]] = {}
    for region, date, m in records:
        triple = (m.m_max, m.m_bb, m.m_ch) if isinstance(m, MobilityMetrics) else m
        groups.setdefault((region, date), []).append(triple)

    out: dict[tuple[RegionKey, dt.date], RegionDayStats] = {}
    for key, triples in groups.items():
        arr = np.array(triples)
        m_max = np.sort(arr[:, 0])
        m_bb = np.sort(arr[:, 1])
        m_ch = np.sort(arr[:, 2])
        stats_max = summarize(m_max)
        out[key] = RegionDayStats(
            region=key[0],
            date=key[1],
            samples=len(triples),
            m_max=stats_max,
            m_bb=summarize(m_bb),
            m_ch=summarize(m_ch),
            m50=stats_max.median,
        )
    return out


def compute_baseline(
    stats: Iterable[RegionDayStats],
    start: dt.date = DEFAULT_BASELINE_START,
    end: dt.date = DEFAULT_BASELINE_END,
) -> dict[RegionKey, float]:
    """Per-region m50_norm: median weekday m50 over dates in [start, end].

    Regions with no weekday data in the window, or whose norm is zero, are
    absent from the table (an index against them would be undefined).
    """
    if start > end:
        raise ConfigError(f"baseline window is empty: {start} > {end}")
    if not _has_weekday(start, end):
        raise ConfigError(f"baseline window {start}..{end} contains no weekdays")
    window: dict[RegionKey, list[float]] = {}
    for s in stats:
        if start <= s.date <= end and s.date.weekday() < 5:
            window.setdefault(s.region, []).append(s.m50)
    table: dict[RegionKey, float] = {}
    for region, values in window.items():
        norm = float(np.median(np.sort(np.array(values))))
        if norm > 0.0:
            table[region] = norm
    return table


def _has_weekday(start: dt.date, end: dt.date) -> bool:
    if (end - start).days >= 6:
        return True
    d = start
    while d <= end:
        if d.weekday() < 5:
            return True
        d += dt.timedelta(days=1)
    return False


def apply_index(
    stats: RegionDayStats, baseline: dict[RegionKey, float]
) -> RegionDayStats:
    """Fill m50_index and pct_change in place when the region has a baseline."""
    norm = baseline.get(stats.region)
    if norm is not None:
        stats.m50_index = 100.0 * stats.m50 / norm
        stats.pct_change = stats.m50_index - 100.0
    return stats

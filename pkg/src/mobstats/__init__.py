"""Batch pipeline turning raw device position reports into per-region
daily mobility statistics (m50 and the m50 mobility index), plus a
deterministic synthetic-data generator and independent brute-force
reference implementations for verifying it.
"""

from .aggregate import RegionDayStats, apply_index, compute_baseline, reduce_region_day
from .collate import DeviceDay, assign_local_day, bucket_sort, build_device_days
from .errors import ConfigError, DataError
from .geo import GeoPoint, convex_hull, haversine_km, solar_tz_offset_hours
from .geocode import Gazetteer, RegionKey, load_gazetteer, nearest_place, reverse_geocode
from .ingest import IngestStats, PositionReport, accuracy_filter, parse_report_line, read_shard
from .metrics import MobilityMetrics, compute_metrics, rejection_reason
from .pipeline import PipelineConfig, compare_stats, run
from .synth import ScenarioSpec, generate, lockdown_spec

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DeviceDay",
    "Gazetteer",
    "GeoPoint",
    "IngestStats",
    "MobilityMetrics",
    "PipelineConfig",
    "PositionReport",
    "RegionDayStats",
    "RegionKey",
    "ScenarioSpec",
    "accuracy_filter",
    "apply_index",
    "assign_local_day",
    "bucket_sort",
    "build_device_days",
    "compare_stats",
    "compute_baseline",
    "compute_metrics",
    "convex_hull",
    "generate",
    "haversine_km",
    "load_gazetteer",
    "lockdown_spec",
    "nearest_place",
    "parse_report_line",
    "read_shard",
    "reduce_region_day",
    "rejection_reason",
    "reverse_geocode",
    "run",
    "solar_tz_offset_hours",
    "__version__",
]

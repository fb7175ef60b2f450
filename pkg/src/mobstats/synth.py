"""Deterministic synthetic position-report generator with truth sidecars.

Every trajectory is derived from named random.Random streams keyed by
(seed, device) and (seed, device, date), so regenerating a scenario is
byte-identical regardless of platform or iteration order. The sidecar's
expected verdicts and metrics come from the independent reference
implementations, applied with the same collation rules the pipeline uses
(single per-device solar offset from the chronologically first accepted
report), so they are comparable end-to-end.

The "planned" trajectory style places one report at an exact prescribed
distance from the day's first report, floor(0.1 n) decoys beyond it and
the rest well inside it, making the trimmed max distance equal the
prescribed value. Scaling the prescription per date then moves every
region's median by that factor exactly, which pins down the expected
mobility index (100 * scale) without tolerance gymnastics.
"""

from __future__ import annotations

import datetime as dt
import gzip
import io
import json
import math
import os
import random
from dataclasses import dataclass, field

from . import oracle

EARTH_RADIUS_KM = 6371.0088

HEADER = "device_id,epoch_s,lat,lon,accuracy_m"

ELIGIBLE_STYLES = ("planned", "scatter", "collinear", "duplicates", "antimeridian", "tight")
INELIGIBLE_STYLES = ("sparse", "short")
STYLES = ELIGIBLE_STYLES + INELIGIBLE_STYLES

# every entry must fail validation; checked by tests
MALFORMED_LINES = (
    "garbage",
    "dev,notanepoch,1.0,2.0,3.0",
    "dev,123,95.0,0.0,5.0",
    "dev,123,0.0,181.0,5.0",
    "dev,123,0.0,0.0,-4.0",
    ",123,0.0,0.0,5.0",
    "dev,123,0.0,0.0,5.0,extra",
    "dev,-5,0.0,0.0,5.0",
    "",
    "dev,123,nan,0.0,5.0",
    "dev,123,0.0,0.0,inf",
)

Row = tuple[int, float, float, float]  # (epoch_s, lat, lon, accuracy_m)

_DAY_START_S = 8 * 3600
_DAY_END_S = 20 * 3600
_EPOCH_ORDINAL = dt.date(1970, 1, 1).toordinal()
_EPOCH_ORD_S = _EPOCH_ORDINAL * 86400


# ---------------------------------------------------------------- toy world

# four 4x4 degree counties in a 2x2 grid, nested inside two admin1 halves
_TOY_ADMIN1 = (
    ("West", "AA-W", 0.0, 4.0),
    ("East", "AA-E", 4.0, 8.0),
)
_TOY_ADMIN2 = (
    ("West", "Westburg County", "AA-W-01", 0.0, 4.0, 0.0, 4.0),
    ("West", "Westfield County", "AA-W-02", 0.0, 4.0, -4.0, 0.0),
    ("East", "Eastburg County", "AA-E-01", 4.0, 8.0, 0.0, 4.0),
    ("East", "Eastfield County", "AA-E-02", 4.0, 8.0, -4.0, 0.0),
)
_TOY_PLACES = (
    ("Westburg", 2.0, 2.0, "AA-W-01"),
    ("Westfield", -2.0, 2.0, "AA-W-02"),
    ("Eastburg", 2.0, 6.0, "AA-E-01"),
    ("Eastfield", -2.0, 6.0, "AA-E-02"),
)


def _box_ring(lon0: float, lon1: float, lat0: float, lat1: float) -> list[list[float]]:
    return [[lon0, lat0], [lon1, lat0], [lon1, lat1], [lon0, lat1], [lon0, lat0]]


def toy_gazetteer_records() -> list[dict]:
    """Gazetteer records for the toy country AA: 2 admin1 halves, 4 counties."""
    recs = []
    for admin1, rid, lon0, lon1 in _TOY_ADMIN1:
        recs.append(
            {
                "type": "region",
                "country_code": "AA",
                "admin1": admin1,
                "admin2": "",
                "region_id": rid,
                "utc_offset_hours": 0,
                "polygons": [_box_ring(lon0, lon1, -4.0, 4.0)],
            }
        )
    for admin1, admin2, rid, lon0, lon1, lat0, lat1 in _TOY_ADMIN2:
        recs.append(
            {
                "type": "region",
                "country_code": "AA",
                "admin1": admin1,
                "admin2": admin2,
                "region_id": rid,
                "utc_offset_hours": 0,
                "polygons": [_box_ring(lon0, lon1, lat0, lat1)],
            }
        )
    for name, lat, lon, rid in _TOY_PLACES:
        recs.append({"type": "place", "name": name, "lat": lat, "lon": lon, "region_id": rid})
    return recs


def write_toy_gazetteer(path: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in toy_gazetteer_records():
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    return path


# ------------------------------------------------------------- trajectories


def destination(lat: float, lon: float, bearing_deg: float, distance_km: float) -> tuple[float, float]:
    """Point reached from (lat, lon) moving distance_km along a great circle."""
    delta = distance_km / EARTH_RADIUS_KM
    theta = math.radians(bearing_deg)
    phi1 = math.radians(lat)
    lam1 = math.radians(lon)
    sin_phi2 = math.sin(phi1) * math.cos(delta) + math.cos(phi1) * math.sin(delta) * math.cos(theta)
    phi2 = math.asin(max(-1.0, min(1.0, sin_phi2)))
    lam2 = lam1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(phi1),
        math.cos(delta) - math.sin(phi1) * math.sin(phi2),
    )
    lon2 = (math.degrees(lam2) + 180.0) % 360.0 - 180.0
    return math.degrees(phi2), lon2


def _day_seconds(rng: random.Random, n: int, start: int = _DAY_START_S, end: int = _DAY_END_S) -> list[int]:
    """n distinct seconds-of-day, first exactly at start, last exactly at end."""
    if n == 1:
        return [start]
    if n == 2:
        return [start, end]
    middle = rng.sample(range(start + 1, end), n - 2)
    return [start] + sorted(middle) + [end]


def _acc(rng: random.Random) -> float:
    return round(rng.uniform(2.0, 45.0), 1)


def day_rows(
    rng: random.Random,
    style: str,
    home_lat: float,
    home_lon: float,
    day_start_epoch: int,
    n: int,
    target_km: float,
    min_reports: int = 10,
    min_span_hours: float = 8.0,
) -> list[Row]:
    """Accepted-report rows for one device-day in the given style.

    Rows are sorted by epoch with distinct epochs; the first row sits at
    (home_lat, home_lon). Eligible styles span exactly 12 local hours.
    """
    if style == "sparse":
        n = rng.randint(1, min_reports - 1)
        secs = _day_seconds(rng, n)
    elif style == "short":
        secs = _day_seconds(rng, n, end=_DAY_START_S + int(min_span_hours * 3600) - 60)
    else:
        secs = _day_seconds(rng, n)

    pts: list[tuple[float, float]]
    if style == "planned":
        k = int(0.10 * n)
        others = [destination(home_lat, home_lon, rng.uniform(0.0, 360.0), target_km)]
        others += [
            destination(home_lat, home_lon, rng.uniform(0.0, 360.0), 2.0 * target_km)
            for _ in range(k)
        ]
        others += [
            destination(home_lat, home_lon, rng.uniform(0.0, 360.0), rng.uniform(0.0, 0.45) * target_km)
            for _ in range(n - 2 - k)
        ]
        rng.shuffle(others)
        pts = [(home_lat, home_lon)] + others
    elif style == "collinear":
        r = min(target_km / 111.0, 1.0)
        if rng.random() < 0.5:
            pts = [(home_lat, home_lon)] + [
                (home_lat, home_lon + rng.uniform(-r, r)) for _ in range(n - 1)
            ]
        else:
            pts = [(home_lat, home_lon)] + [
                (home_lat + rng.uniform(-r, r), home_lon) for _ in range(n - 1)
            ]
    elif style == "duplicates":
        uniq = [(home_lat, home_lon)] + [
            destination(home_lat, home_lon, rng.uniform(0.0, 360.0), rng.uniform(0.0, target_km))
            for _ in range(rng.randint(1, 3))
        ]
        pts = [uniq[0]] + [uniq[rng.randrange(len(uniq))] for _ in range(n - 1)]
    elif style == "tight":
        pts = [(home_lat, home_lon)] * n
    else:  # scatter, antimeridian, sparse, short: uniform cloud around home
        r = min(target_km / 111.0, 2.0)
        pts = [(home_lat, home_lon)]
        for _ in range(len(secs) - 1):
            lat = home_lat + rng.uniform(-r, r)
            lon = (home_lon + rng.uniform(-r, r) + 180.0) % 360.0 - 180.0
            pts.append((lat, lon))

    return [(day_start_epoch + s, lat, lon, _acc(rng)) for s, (lat, lon) in zip(secs, pts)]


def random_day_rows(rng: random.Random, style: str | None = None, day_number: int = 18330) -> list[Row]:
    """A self-contained random device-day for oracle-equivalence checks."""
    if style is None:
        style = rng.choice(STYLES)
    if style == "antimeridian":
        home_lat = rng.uniform(-60.0, 60.0)
        home_lon = rng.choice((179.85, -179.85))
    else:
        home_lat = rng.uniform(-80.0, 80.0)
        home_lon = rng.uniform(-170.0, 170.0)
    tz = oracle.solar_offset_hours(home_lon)
    day_start = day_number * 86400 - 3600 * tz
    n = rng.randint(10, 40)
    target = rng.uniform(0.05, 25.0)
    return day_rows(rng, style, home_lat, home_lon, day_start, n, target)


# ---------------------------------------------------------------- scenarios


@dataclass
class ScenarioSpec:
    """Knobs for one synthetic dataset; the seed fully determines the bytes."""

    seed: int = 0
    devices: int = 48
    start_date: dt.date = dt.date(2020, 2, 17)
    end_date: dt.date = dt.date(2020, 3, 13)
    base_mobility_km: float = 5.2
    scale_default: float = 1.0
    scale_overrides: dict[dt.date, float] = field(default_factory=dict)
    styles: tuple[str, ...] = ("planned",)
    reports_min: int = 12
    reports_max: int = 24
    accuracy_reject_fraction: float = 0.0
    malformed_fraction: float = 0.0
    ineligible_fraction: float = 0.0
    shards: int = 4
    gzip_shards: bool = False

    def scale_for(self, date: dt.date) -> float:
        return self.scale_overrides.get(date, self.scale_default)

    def dates(self) -> list[dt.date]:
        out = []
        d = self.start_date
        while d <= self.end_date:
            out.append(d)
            d += dt.timedelta(days=1)
        return out


def lockdown_spec(
    seed: int,
    devices: int,
    post_scale: float,
    post_start: dt.date = dt.date(2020, 3, 9),
    post_end: dt.date = dt.date(2020, 3, 13),
    **kwargs,
) -> ScenarioSpec:
    """Baseline-window mobility at scale 1.0, then post_scale afterwards."""
    overrides = {}
    d = post_start
    while d <= post_end:
        overrides[d] = post_scale
        d += dt.timedelta(days=1)
    return ScenarioSpec(
        seed=seed,
        devices=devices,
        end_date=post_end,
        scale_overrides=overrides,
        **kwargs,
    )


def _device_home(rng: random.Random, style: str) -> tuple[float, float]:
    if style == "antimeridian":
        return rng.uniform(-60.0, 60.0), rng.choice((179.85, -179.85))
    _, _, _, lon0, lon1, lat0, lat1 = _TOY_ADMIN2[rng.randrange(len(_TOY_ADMIN2))]
    return rng.uniform(lat0 + 0.6, lat1 - 0.6), rng.uniform(lon0 + 0.6, lon1 - 0.6)


def generate(spec: ScenarioSpec, out_dir: str) -> dict:
    """Write input shards, the toy gazetteer and the truth sidecar.

    Returns the expected ingest counters and file paths. The sidecar holds
    one NDJSON record per device-day with the reference verdict and metrics,
    grouped exactly as the pipeline will group them.
    """
    shards_dir = os.path.join(out_dir, "shards")
    os.makedirs(shards_dir, exist_ok=True)
    gaz_path = write_toy_gazetteer(os.path.join(out_dir, "gazetteer.ndjson"))

    suffix = ".csv.gz" if spec.gzip_shards else ".csv"
    shard_paths = [
        os.path.join(shards_dir, f"part-{s:02d}{suffix}") for s in range(spec.shards)
    ]
    shard_lines: list[list[str]] = [[] for _ in range(spec.shards)]

    truth: list[dict] = []
    accepted = rejected = 0
    dates = spec.dates()

    for i in range(spec.devices):
        rng_d = random.Random(f"{spec.seed}:device:{i}")
        device_id = f"{rng_d.getrandbits(40):010x}-{i:04d}"
        style = rng_d.choice(spec.styles)
        home_lat, home_lon = _device_home(rng_d, style)
        wobble = rng_d.uniform(0.9, 1.1)
        base_km = spec.base_mobility_km * wobble
        n_base = rng_d.randint(spec.reports_min, spec.reports_max)
        tz_home = oracle.solar_offset_hours(home_lon)

        device_rows: list[Row] = []
        lines = shard_lines[i % spec.shards]
        for date in dates:
            rng_day = random.Random(f"{spec.seed}:day:{device_id}:{date.isoformat()}")
            day_style = style
            if spec.ineligible_fraction and rng_day.random() < spec.ineligible_fraction:
                day_style = rng_day.choice(INELIGIBLE_STYLES)
            n = max(spec.reports_min, n_base + rng_day.randint(-2, 2))
            day_start = date.toordinal() * 86400 - _EPOCH_ORD_S - 3600 * tz_home
            rows = day_rows(
                rng_day, day_style, home_lat, home_lon, day_start, n,
                base_km * spec.scale_for(date),
            )
            device_rows.extend(rows)
            accepted += len(rows)

            n_rej = int(spec.accuracy_reject_fraction * len(rows))
            rej_rows = [
                (
                    day_start + rng_day.randint(_DAY_START_S, _DAY_END_S),
                    home_lat,
                    home_lon,
                    round(rng_day.uniform(55.0, 130.0), 1),
                )
                for _ in range(n_rej)
            ]
            rejected += n_rej

            for epoch, lat, lon, acc in sorted(rows + rej_rows):
                lines.append(f"{device_id},{epoch},{lat!r},{lon!r},{acc!r}")

        truth.extend(_truth_records(device_id, device_rows))

    truth.sort(key=lambda t: (t["device_id"], t["date"]))
    truth_path = os.path.join(out_dir, "truth.ndjson")
    with open(truth_path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in truth:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")

    malformed = 0
    for s, path in enumerate(shard_paths):
        rng_s = random.Random(f"{spec.seed}:shard:{s}")
        if spec.gzip_shards:
            # mtime pinned so the compressed container is byte-reproducible
            raw = gzip.GzipFile(path, "wb", mtime=0)
            fh = io.TextIOWrapper(raw, encoding="utf-8", newline="\n")
        else:
            fh = open(path, "w", encoding="utf-8", newline="\n")
        with fh:
            fh.write(HEADER + "\n")
            for line in shard_lines[s]:
                if spec.malformed_fraction and rng_s.random() < spec.malformed_fraction:
                    fh.write(rng_s.choice(MALFORMED_LINES) + "\n")
                    malformed += 1
                fh.write(line + "\n")

    expected = {
        "lines_read": accepted + rejected + malformed,
        "lines_malformed": malformed,
        "reports_accepted": accepted,
        "reports_rejected_accuracy": rejected,
        "device_days": len(truth),
        "eligible_device_days": sum(1 for t in truth if t["eligible"]),
    }
    with open(os.path.join(out_dir, "expected.json"), "w", encoding="utf-8") as fh:
        json.dump(expected, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {
        **expected,
        "shard_paths": shard_paths,
        "gazetteer_path": gaz_path,
        "truth_path": truth_path,
    }


def _truth_records(device_id: str, rows: list[Row]) -> list[dict]:
    """Reference device-days for one device, grouped by the collation rules."""
    if not rows:
        return []
    ordered = sorted(rows)
    tz = oracle.solar_offset_hours(ordered[0][2])
    by_day: dict[int, list[Row]] = {}
    for row in ordered:
        by_day.setdefault(oracle.local_day(row[0], tz), []).append(row)
    out = []
    for day_number in sorted(by_day):
        date = dt.date.fromordinal(day_number + _EPOCH_ORDINAL)
        rec = {"device_id": device_id, "date": date.isoformat()}
        rec.update(oracle.oracle_metrics(by_day[day_number]))
        out.append(rec)
    return out


def oracle_metrics(rows, **kwargs):
    """Reference metrics for one device-day; see the oracle module."""
    return oracle.oracle_metrics(rows, **kwargs)

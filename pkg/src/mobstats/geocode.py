"""Reverse geocoding against a local gazetteer file.

The gazetteer is newline-delimited JSON: region records carry one or more
closed polygon rings as [lon, lat] pairs, place records are named points.
Containment uses even-odd ray casting with boundary points counting as
inside; when several regions contain a point, the deepest admin level
wins, then the smallest bounding box, then the smallest region_id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import DataError
from .geo import GeoPoint, haversine_km
from .ingest import open_shard_text

Ring = list[tuple[float, float]]


@dataclass(frozen=True, slots=True)
class RegionKey:
    country_code: str
    admin1: str
    admin2: str
    region_id: str

    @property
    def level(self) -> int:
        """0 = country only, 1 = admin1, 2 = admin2."""
        if self.admin2:
            return 2
        if self.admin1:
            return 1
        return 0


@dataclass(slots=True)
class Region:
    key: RegionKey
    rings: list[Ring]
    bbox: tuple[float, float, float, float]  # min_lon, min_lat, max_lon, max_lat
    bbox_area: float
    utc_offset_hours: int | None


@dataclass(frozen=True, slots=True)
class Place:
    name: str
    lat: float
    lon: float
    region: RegionKey


@dataclass(slots=True)
class Gazetteer:
    regions: list[Region]
    places: list[Place]
    admin1_ids: dict[tuple[str, str], str]  # (country_code, admin1) -> region_id


def _validate_ring(ring: list, region_id: str) -> Ring:
    if len(ring) < 4:
        raise DataError(f"region {region_id}: ring has fewer than 4 points")
    try:
        pts = [(float(x), float(y)) for x, y in ring]
    except (TypeError, ValueError) as e:
        raise DataError(f"region {region_id}: bad ring point: {e}") from None
    if pts[0] != pts[-1]:
        raise DataError(f"region {region_id}: ring is not closed")
    return pts


def _validate_key(rec: dict) -> RegionKey:
    cc = rec.get("country_code", "")
    rid = str(rec.get("region_id", ""))
    if len(cc) != 2 or not cc.isascii() or not cc.isalpha() or not cc.isupper():
        raise DataError(f"region {rid}: bad country_code {cc!r}")
    admin1 = rec.get("admin1", "") or ""
    admin2 = rec.get("admin2", "") or ""
    if admin2 and not admin1:
        raise DataError(f"region {rid}: admin2 without admin1")
    return RegionKey(cc, admin1, admin2, rid)


def load_gazetteer(path: str) -> Gazetteer:
    """Load and validate a gazetteer file; raises DataError naming the bad record."""
    regions: list[Region] = []
    places_raw: list[dict] = []
    with open_shard_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"gazetteer line {lineno}: invalid JSON: {e}") from None
            kind = rec.get("type")
            if kind == "region":
                key = _validate_key(rec)
                rings = [_validate_ring(r, key.region_id) for r in rec.get("polygons", [])]
                if not rings:
                    raise DataError(f"region {key.region_id}: no polygons")
                xs = [x for ring in rings for x, _ in ring]
                ys = [y for ring in rings for _, y in ring]
                bbox = (min(xs), min(ys), max(xs), max(ys))
                area = (bbox[2] - bbox[0]) * (bbox[3] - bbox[1])
                utc = rec.get("utc_offset_hours")
                regions.append(Region(key, rings, bbox, area, None if utc is None else int(utc)))
            elif kind == "place":
                places_raw.append(rec)
            else:
                raise DataError(f"gazetteer line {lineno}: unknown record type {kind!r}")

    by_id = {r.key.region_id: r.key for r in regions}
    places = []
    for rec in places_raw:
        rid = str(rec.get("region_id", ""))
        if rid not in by_id:
            raise DataError(f"place {rec.get('name')!r}: unknown region_id {rid!r}")
        places.append(Place(str(rec["name"]), float(rec["lat"]), float(rec["lon"]), by_id[rid]))

    admin1_ids = {
        (r.key.country_code, r.key.admin1): r.key.region_id
        for r in regions
        if r.key.level == 1
    }
    return Gazetteer(regions, places, admin1_ids)


def point_on_ring_boundary(ring: Ring, x: float, y: float) -> bool:
    """True if (x, y) lies on any edge of the closed ring."""
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) != 0.0:
            continue
        if min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2):
            return True
    return False


def _ray_crossings(ring: Ring, x: float, y: float) -> int:
    crossings = 0
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        if (y1 > y) != (y2 > y):
            x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_at > x:
                crossings += 1
    return crossings


def region_contains(region: Region, x: float, y: float) -> bool:
    """Even-odd containment over all of the region's rings, boundary inclusive.

    Holes need no special casing: a point inside a hole ring crosses an even
    number of edges in total.
    """
    bx0, by0, bx1, by1 = region.bbox
    if not (bx0 <= x <= bx1 and by0 <= y <= by1):
        return False
    crossings = 0
    for ring in region.rings:
        if point_on_ring_boundary(ring, x, y):
            return True
        crossings += _ray_crossings(ring, x, y)
    return crossings % 2 == 1


def reverse_geocode(gaz: Gazetteer, p: GeoPoint) -> RegionKey | None:
    """Most specific region containing p, or None when nothing matches."""
    best: tuple[int, float, str] | None = None
    best_key: RegionKey | None = None
    for region in gaz.regions:
        if not region_contains(region, p.lon, p.lat):
            continue
        rank = (-region.key.level, region.bbox_area, region.key.region_id)
        if best is None or rank < best:
            best = rank
            best_key = region.key
    return best_key


def nearest_place(gaz: Gazetteer, p: GeoPoint, max_km: float) -> str | None:
    """Name of the haversine-nearest place within max_km; ties alphabetical."""
    if max_km <= 0:
        raise ValueError(f"max_km must be positive, got {max_km}")
    best: tuple[float, str] | None = None
    for place in gaz.places:
        d = haversine_km(p, GeoPoint(place.lat, place.lon))
        if d <= max_km and (best is None or (d, place.name) < best):
            best = (d, place.name)
    return best[1] if best else None

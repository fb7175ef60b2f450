"""Spherical and planar geometry underlying the mobility measures.

Distances are great-circle kilometers on a sphere of mean radius
6371.0088 km. Areas are plain floats in square degrees; the published
conversion ``111 * sqrt(area) * cos(latitude)`` turns them into a linear
kilometer measure and is applied verbatim, cos factor outside the root.

Longitude handling: point sets whose raw longitude span exceeds 180° are
assumed to straddle the antimeridian and are unwrapped (negative
longitudes shifted by +360) before any box or hull computation, so a
device near ±180° does not produce a near-global bounding box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0088  # IUGG mean radius
KM_PER_DEGREE = 111.0  # constant used by the linear-distance conversion


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """A validated WGS-style coordinate: lat in [-90, 90], lon in [-180, 180).

    A longitude of exactly 180 is normalized to -180; anything else out of
    range raises ValueError.
    """

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and -90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if not (math.isfinite(self.lon) and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon!r}")
        if self.lon == 180.0:
            object.__setattr__(self, "lon", -180.0)


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in kilometers."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))


def haversine_km_arr(lat0: float, lon0: float, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Vectorized haversine: distances from one anchor to many points, in km."""
    phi0 = math.radians(lat0)
    phis = np.radians(lats)
    dphi = np.radians(lats - lat0)
    dlam = np.radians(lons - lon0)
    h = np.sin(dphi / 2.0) ** 2 + math.cos(phi0) * np.cos(phis) * np.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arctan2(np.sqrt(h), np.sqrt(1.0 - h))


def solar_tz_offset_hours(lon: float) -> int:
    """Approximate solar timezone offset: round(lon / 15), half away from zero."""
    x = lon / 15.0
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def unwrap_lonlat(lonlat: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Unwrap planar (lon, lat) tuples across the antimeridian.

    If the raw longitude span exceeds 180°, every negative longitude gets
    +360 so the set is contiguous; resulting x values may lie in [0, 360).
    """
    lons = [x for x, _ in lonlat]
    if max(lons) - min(lons) > 180.0:
        return [(x + 360.0 if x < 0.0 else x, y) for x, y in lonlat]
    return list(lonlat)


def planar_lonlat(points: Sequence[GeoPoint]) -> list[tuple[float, float]]:
    """Project points to planar (lon, lat) tuples, unwrapping the antimeridian."""
    return unwrap_lonlat([(p.lon, p.lat) for p in points])


def bounding_box_area(points: Sequence[GeoPoint]) -> float:
    """Area of the axis-aligned bounding box in square degrees."""
    if not points:
        raise ValueError("no points")
    xy = planar_lonlat(points)
    xs = [x for x, _ in xy]
    ys = [y for _, y in xy]
    return (max(xs) - min(xs)) * (max(ys) - min(ys))


def _cross(o: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[GeoPoint]) -> list[tuple[float, float]]:
    """Convex hull of the point set, treated as planar (lon, lat) coordinates.

    Vertices are in the antimeridian-unwrapped frame (see planar_lonlat),
    ready for polygon_area.
    """
    if not points:
        raise ValueError("no points")
    return convex_hull_xy(planar_lonlat(points))


def convex_hull_xy(lonlat: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Convex hull of planar (lon, lat) tuples; no antimeridian handling.

    Monotone chain. Returns hull vertices counterclockwise starting from the
    lexicographically smallest, with duplicates and collinear interior points
    excluded. Degenerate inputs yield 1- or 2-point "hulls".
    """
    if not lonlat:
        raise ValueError("no points")
    pts = sorted(set(lonlat))
    if len(pts) <= 2:
        return pts

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # all points collinear: keep the two extremes
        return [pts[0], pts[-1]]
    return hull


def polygon_area(vertices: Sequence[tuple[float, float]]) -> float:
    """Shoelace area of a simple polygon (open ring), in square degrees.

    Coordinates are translated to the first vertex before accumulating;
    small polygons far from the origin would otherwise lose most of their
    precision to cancellation.
    """
    n = len(vertices)
    if n < 3:
        return 0.0
    x0, y0 = vertices[0]
    acc = 0.0
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        acc += (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    return abs(acc) / 2.0


def area_to_linear_km(area: float, lat: float) -> float:
    """Convert a square-degree area to the published linear km measure.

    Applies 111 * sqrt(area) * cos(lat) exactly as printed, with the cosine
    outside the square root.
    """
    if area < 0.0:
        raise ValueError(f"negative area: {area!r}")
    return KM_PER_DEGREE * math.sqrt(area) * math.cos(math.radians(lat))

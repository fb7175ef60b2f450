"""
A tour of the geometry toolkit
==============================

Distances, bounding boxes and convex hulls on a handful of points,
computed the same way the pipeline computes them for a device-day.
"""

from mobstats.geo import (
    GeoPoint,
    bounding_box_area,
    convex_hull,
    haversine_km,
    polygon_area,
    solar_tz_offset_hours,
)

# A morning in Denver: home, a coffee shop, the office, a park.
home = GeoPoint(39.7392, -104.9903)
stops = [
    home,
    GeoPoint(39.7420, -104.9915),
    GeoPoint(39.7512, -104.9967),
    GeoPoint(39.7085, -105.0110),
]

# Great-circle distance from home to each stop.
print("distances from home (km):")
for p in stops[1:]:
    print(f"  ({p.lat:8.4f}, {p.lon:9.4f})  {haversine_km(home, p):6.3f}")

# The bounding box is measured in square degrees on the (lon, lat) plane.
a_bb = bounding_box_area(stops)
print(f"\nbounding box area: {a_bb:.6f} deg^2")

# The convex hull drops interior points and returns planar vertices
# counterclockwise; its shoelace area can never exceed the box area.
hull = convex_hull(stops)
a_ch = polygon_area(hull)
print(f"hull vertices:     {len(hull)}")
print(f"hull area:         {a_ch:.6f} deg^2  (<= box area: {a_ch <= a_bb})")

# Solar time zone: longitude alone picks the offset, 15 degrees per hour.
print(f"\nsolar offset at lon {home.lon}: {solar_tz_offset_hours(home.lon):+d} h")
print(f"solar offset at lon 174.8:    {solar_tz_offset_hours(174.8):+d} h")

# Near the antimeridian the box stays small because longitudes are
# unwrapped before measuring: a 0.02 degree hop across the date line is
# a 0.02 degree box, not a 359.98 degree one.
cross = [GeoPoint(10.0, 179.99), GeoPoint(10.01, -179.99)]
print(f"\nbox area straddling the date line: {bounding_box_area(cross):.6f} deg^2")

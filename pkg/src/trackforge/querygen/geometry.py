"""Aerodrome circles and their union."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from shapely.geometry import Polygon
from shapely.ops import unary_union

from trackforge.errors import DegeneratePolygon, PolarDegeneracy, SchemaMismatch
from trackforge.geo import EARTH_RADIUS_M, NM_M

TERMINAL_RADIUS_M = 8 * NM_M  # 14,816 m
MAX_ABS_LAT = 85.0


@dataclass(frozen=True)
class Aerodrome:
    id: str
    lat: float
    lon: float

    def __post_init__(self):
        if not -90 <= self.lat <= 90 or not -180 <= self.lon <= 180:
            raise ValueError(f"aerodrome {self.id}: coordinates out of range")


def read_aerodromes(path: str | Path) -> list[Aerodrome]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["id", "lat", "lon"]:
            raise SchemaMismatch(f"{path}: expected header id,lat,lon")
        return [Aerodrome(r["id"], float(r["lat"]), float(r["lon"])) for r in reader]


def circle_polygon(aerodrome: Aerodrome, radius_m: float = TERMINAL_RADIUS_M,
                   n_vertices: int = 64) -> Polygon:
    """Regular polygon inscribed in the spherical circle of `radius_m` around the aerodrome.

    Vertex ``k`` is the destination point at bearing ``360 * k / n`` from north,
    so every vertex lies on the circle and every chord lies inside it.
    """
    if not radius_m > 0:
        raise DegeneratePolygon("radius must be positive")
    if n_vertices < 3:
        raise DegeneratePolygon("need at least 3 vertices")
    if abs(aerodrome.lat) > MAX_ABS_LAT:
        raise PolarDegeneracy(f"aerodrome {aerodrome.id} is too close to a pole")
    delta = radius_m / EARTH_RADIUS_M
    phi, lam = math.radians(aerodrome.lat), math.radians(aerodrome.lon)
    pts = []
    for k in range(n_vertices):
        theta = 2 * math.pi * k / n_vertices
        phi2 = math.asin(math.sin(phi) * math.cos(delta)
                         + math.cos(phi) * math.sin(delta) * math.cos(theta))
        lam2 = lam + math.atan2(math.sin(theta) * math.sin(delta) * math.cos(phi),
                                math.cos(delta) - math.sin(phi) * math.sin(phi2))
        pts.append((math.degrees(lam2), math.degrees(phi2)))
    return Polygon(pts)


def union_polygons(polygons: Sequence[Polygon]) -> list[Polygon]:
    """Merge overlapping polygons; disjoint ones stay separate. Sorted by (min lat, min lon)."""
    if not polygons:
        raise ValueError("need at least one polygon")
    merged = unary_union(list(polygons))
    parts = list(merged.geoms) if hasattr(merged, "geoms") else [merged]
    return sorted(parts, key=lambda p: (p.bounds[1], p.bounds[0]))

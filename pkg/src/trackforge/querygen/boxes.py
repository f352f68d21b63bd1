"""Filtering rectangles and enriching the survivors with altitude and time-zone data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from trackforge.errors import OutOfCoverage
from trackforge.geo import haversine_m
from trackforge.querygen.geometry import TERMINAL_RADIUS_M, Aerodrome
from trackforge.querygen.rectilinear import Rect
from trackforge.tracks.airspace import AirspaceVolume
from trackforge.tracks.dem import DemGrid

DEFAULT_CLASSES = ("B", "C", "D")
AGL_FLOOR_FT = 0.0
AGL_CEILING_FT = 5100.0
HARD_CEILING_FT = 12500.0


@dataclass(frozen=True)
class QueryBox:
    box_id: int
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    elev_min_ft: float
    elev_max_ft: float
    msl_min_ft: float
    msl_max_ft: float
    tz_offset_h: int
    group_id: int = -1
    airspace_classes: frozenset[str] = frozenset()
    area_deg2: float = 0.0

    def __post_init__(self):
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ValueError("box must have positive extent")
        if self.msl_min_ft > self.msl_max_ft:
            raise ValueError("msl_min_ft must not exceed msl_max_ft")


def nearest_distance_m(rect: Rect, aerodrome: Aerodrome) -> float:
    """Distance from the aerodrome to the closest point of the rectangle (0 if inside)."""
    lat = min(max(aerodrome.lat, rect.lat_min), rect.lat_max)
    lon = min(max(aerodrome.lon, rect.lon_min), rect.lon_max)
    return float(haversine_m(aerodrome.lat, aerodrome.lon, lat, lon))


def airspace_classes_of(rect: Rect, volumes: Iterable[AirspaceVolume],
                        classes: Sequence[str] = DEFAULT_CLASSES) -> frozenset[str]:
    """Requested classes whose polygons share interior area with the rectangle."""
    poly = rect.to_polygon()
    return frozenset(
        v.cls for v in volumes
        if v.cls in classes and poly.intersects(v.polygon) and not poly.touches(v.polygon)
    )


def filter_boxes(rects: Sequence[Rect], volumes: Sequence[AirspaceVolume] | None,
                 aerodromes: Sequence[Aerodrome], max_dist_m: float = TERMINAL_RADIUS_M,
                 classes: Sequence[str] = DEFAULT_CLASSES) -> list[tuple[Rect, frozenset[str]]]:
    """Keep rectangles that touch requested airspace and lie near an aerodrome.

    ``volumes=None`` disables the airspace condition (survivors get no classes).
    """
    kept = []
    for rect in rects:
        found = frozenset() if volumes is None else airspace_classes_of(rect, volumes, classes)
        if volumes is not None and not found:
            continue
        if any(nearest_distance_m(rect, a) <= max_dist_m for a in aerodromes):
            kept.append((rect, found))
    return kept


def elevation_range(lat_min: float, lat_max: float, lon_min: float, lon_max: float,
                    dem: DemGrid) -> tuple[float, float]:
    """Min and max terrain over every DEM cell meeting the closed rectangle.

    Each grid node stands for the cell of side ``cell_deg`` centred on it.
    Cells that only touch the rectangle's edge are included.
    """
    g_lat0, g_lat1, g_lon0, g_lon1 = dem.cell_bounds()
    tol = 1e-9
    if lat_min < g_lat0 - tol or lat_max > g_lat1 + tol or lon_min < g_lon0 - tol or lon_max > g_lon1 + tol:
        raise OutOfCoverage("rectangle extends beyond the DEM")
    c = dem.cell_deg

    def span(lo, hi, origin, n):
        a = math.ceil((lo - origin) / c - 0.5 - tol)
        b = math.floor((hi - origin) / c + 0.5 + tol)
        return max(a, 0), min(b, n - 1)

    i0, i1 = span(lat_min, lat_max, dem.origin_lat, dem.n_rows)
    j0, j1 = span(lon_min, lon_max, dem.origin_lon, dem.n_cols)
    block = dem.filled[i0:i1 + 1, j0:j1 + 1]
    return float(block.min()), float(block.max())


def msl_bounds(elev_min_ft: float, elev_max_ft: float, agl_floor_ft: float = AGL_FLOOR_FT,
               agl_ceiling_ft: float = AGL_CEILING_FT, hard_ceiling_ft: float = HARD_CEILING_FT,
               msl_cap_ft: float | None = None) -> tuple[float, float]:
    """MSL altitude window: floor above the lowest terrain, ceiling above the highest.

    The ceiling is the tightest of the desired AGL ceiling, the hard AGL
    ceiling, and an optional absolute MSL cap. It never drops below the floor.
    """
    if elev_min_ft > elev_max_ft:
        raise ValueError("elev_min_ft must not exceed elev_max_ft")
    lo = elev_min_ft + agl_floor_ft
    hi = min(elev_max_ft + agl_ceiling_ft, elev_max_ft + hard_ceiling_ft)
    if msl_cap_ft is not None:
        hi = min(hi, msl_cap_ft)
    return lo, max(hi, lo)


def tz_offset(center_lon: float) -> int:
    """Meridian time zone; halves round away from zero."""
    x = center_lon / 15.0
    h = math.floor(abs(x) + 0.5)
    return max(-12, min(12, int(math.copysign(h, x))))


def box_timezone(rect) -> int:
    return tz_offset((rect.lon_min + rect.lon_max) / 2)


def make_query_boxes(survivors: Sequence[tuple[Rect, frozenset[str]]], dem: DemGrid,
                     agl_floor_ft: float = AGL_FLOOR_FT, agl_ceiling_ft: float = AGL_CEILING_FT,
                     hard_ceiling_ft: float = HARD_CEILING_FT,
                     msl_cap_ft: float | None = None) -> list[QueryBox]:
    boxes = []
    for k, (rect, classes) in enumerate(survivors):
        e_lo, e_hi = elevation_range(rect.lat_min, rect.lat_max, rect.lon_min, rect.lon_max, dem)
        m_lo, m_hi = msl_bounds(e_lo, e_hi, agl_floor_ft, agl_ceiling_ft, hard_ceiling_ft, msl_cap_ft)
        boxes.append(QueryBox(k, rect.lat_min, rect.lat_max, rect.lon_min, rect.lon_max,
                              e_lo, e_hi, m_lo, m_hi, box_timezone(rect),
                              airspace_classes=classes, area_deg2=rect.area_deg2))
    return boxes

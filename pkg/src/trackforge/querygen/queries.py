"""Per-day query emission, load-balancing groups and the end-to-end pipeline."""

from __future__ import annotations

import csv
import datetime as dt
import heapq
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from trackforge.querygen.boxes import (
    AGL_CEILING_FT,
    AGL_FLOOR_FT,
    DEFAULT_CLASSES,
    HARD_CEILING_FT,
    QueryBox,
    filter_boxes,
    make_query_boxes,
)
from trackforge.querygen.geometry import TERMINAL_RADIUS_M, Aerodrome, circle_polygon, union_polygons
from trackforge.querygen.rectilinear import (
    DEFAULT_GRID_DEG,
    DEFAULT_MAX_SPAN_DEG,
    Rect,
    RectilinearRegion,
    join_split_rectangles,
    rectilinear_cover,
)
from trackforge.tracks.airspace import AirspaceVolume
from trackforge.tracks.dem import DemGrid

QUERY_HEADER = ["group_id", "box_id", "lat_min", "lat_max", "lon_min", "lon_max",
                "msl_min_ft", "msl_max_ft", "day", "utc_start", "utc_end"]
OUTLINE_HEADER = ["box_id", "group_id", "lat1", "lon1", "lat2", "lon2"]


@dataclass(frozen=True)
class Query:
    box: QueryBox
    day: dt.date
    utc_start: dt.datetime
    utc_end: dt.datetime

    @property
    def msl_min_ft(self) -> float:
        return self.box.msl_min_ft

    @property
    def msl_max_ft(self) -> float:
        return self.box.msl_max_ft


def lpt_groups(weights: Sequence[float], group_count: int) -> list[int]:
    """Longest-processing-time assignment: heaviest item first onto the lightest group."""
    if group_count < 1:
        raise ValueError("group_count must be >= 1")
    order = sorted(range(len(weights)), key=lambda i: (-weights[i], i))
    heap = [(0.0, g) for g in range(group_count)]
    out = [0] * len(weights)
    for i in order:
        load, g = heapq.heappop(heap)
        out[i] = g
        heapq.heappush(heap, (load + weights[i], g))
    return out


def local_day_window(day: dt.date, tz_offset_h: int) -> tuple[dt.datetime, dt.datetime]:
    start = dt.datetime(day.year, day.month, day.day, tzinfo=dt.timezone.utc) - dt.timedelta(hours=tz_offset_h)
    return start, start + dt.timedelta(days=1)


def emit_queries(boxes: Sequence[QueryBox], days: Sequence[dt.date], group_count: int = 1
                 ) -> tuple[list[Query], list[QueryBox]]:
    """One query per (box, day); returns the queries and the boxes with group ids set."""
    if not boxes:
        raise ValueError("need at least one box")
    groups = lpt_groups([b.area_deg2 for b in boxes], group_count)
    grouped = [replace(b, group_id=g) for b, g in zip(boxes, groups)]
    queries = []
    for b in grouped:
        for day in days:
            start, end = local_day_window(day, b.tz_offset_h)
            queries.append(Query(b, day, start, end))
    return queries, grouped


def day_list(first: tuple[int, int] = (2019, 1), last: tuple[int, int] = (2020, 2),
             days_per_month: int = 14) -> list[dt.date]:
    """The first `days_per_month` days of every month from `first` through `last` inclusive."""
    out = []
    y, m = first
    while (y, m) <= last:
        out.extend(dt.date(y, m, d) for d in range(1, days_per_month + 1))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


def write_queries_csv(queries: Sequence[Query], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(QUERY_HEADER)
        for q in queries:
            b = q.box
            w.writerow([b.group_id, b.box_id, repr(b.lat_min), repr(b.lat_max), repr(b.lon_min),
                        repr(b.lon_max), repr(b.msl_min_ft), repr(b.msl_max_ft), q.day.isoformat(),
                        q.utc_start.isoformat(), q.utc_end.isoformat()])


def write_box_outlines_csv(boxes: Sequence[QueryBox], path: str | Path) -> None:
    """Four edges per box, for plotting with any external tool."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OUTLINE_HEADER)
        for b in boxes:
            corners = [(b.lat_min, b.lon_min), (b.lat_min, b.lon_max),
                       (b.lat_max, b.lon_max), (b.lat_max, b.lon_min)]
            for k in range(4):
                (a1, o1), (a2, o2) = corners[k], corners[(k + 1) % 4]
                w.writerow([b.box_id, b.group_id, repr(a1), repr(o1), repr(a2), repr(o2)])


@dataclass(frozen=True)
class QueryGenConfig:
    radius_m: float = TERMINAL_RADIUS_M
    n_vertices: int = 64
    grid_deg: float = DEFAULT_GRID_DEG
    max_span_deg: float = DEFAULT_MAX_SPAN_DEG
    max_dist_m: float = TERMINAL_RADIUS_M
    classes: tuple[str, ...] = DEFAULT_CLASSES
    agl_floor_ft: float = AGL_FLOOR_FT
    agl_ceiling_ft: float = AGL_CEILING_FT
    hard_ceiling_ft: float = HARD_CEILING_FT
    msl_cap_ft: float | None = None
    group_count: int = 8


@dataclass
class QueryGenResult:
    polygons: list
    regions: list[RectilinearRegion]
    rectangles: list[Rect]
    boxes: list[QueryBox]
    queries: list[Query]
    counts: dict = field(default_factory=dict)


def generate_queries(aerodromes: Sequence[Aerodrome], dem: DemGrid,
                     volumes: Sequence[AirspaceVolume] | None, days: Sequence[dt.date],
                     config: QueryGenConfig = QueryGenConfig()) -> QueryGenResult:
    circles = [circle_polygon(a, config.radius_m, config.n_vertices) for a in aerodromes]
    polygons = union_polygons(circles)
    regions = rectilinear_cover(polygons, config.grid_deg)
    rects = join_split_rectangles(regions, config.max_span_deg)
    survivors = filter_boxes(rects, volumes, aerodromes, config.max_dist_m, config.classes)
    boxes = make_query_boxes(survivors, dem, config.agl_floor_ft, config.agl_ceiling_ft,
                             config.hard_ceiling_ft, config.msl_cap_ft)
    queries, boxes = emit_queries(boxes, days, config.group_count) if boxes else ([], [])
    counts = {"aerodromes": len(aerodromes), "polygons": len(polygons), "regions": len(regions),
              "rectangles": len(rects), "boxes": len(boxes), "days": len(days), "queries": len(queries)}
    return QueryGenResult(polygons, regions, rects, boxes, queries, counts)

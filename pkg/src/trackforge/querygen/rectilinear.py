"""Rectilinear covers on a snapping grid and their decomposition into rectangles.

All geometry here lives on integer grid cells: cell ``(i, j)`` spans
latitudes ``[i * g, (i + 1) * g)`` and longitudes ``[j * g, (j + 1) * g)``
for grid size ``g``. Working in cells keeps disjointness and area
bookkeeping exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from shapely.geometry import Polygon, box
from shapely.ops import unary_union

DEFAULT_GRID_DEG = 0.05
DEFAULT_MAX_SPAN_DEG = 2.0


def _edge(k: int, grid_deg: float) -> float:
    # round away product noise so 801 * 0.05 reads as 40.05
    return round(k * grid_deg, 10)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box covering cell rows ``i0..i1-1`` and columns ``j0..j1-1``."""

    i0: int
    i1: int
    j0: int
    j1: int
    grid_deg: float

    def __post_init__(self):
        if not (self.i0 < self.i1 and self.j0 < self.j1):
            raise ValueError("empty rectangle")

    @property
    def lat_min(self) -> float:
        return _edge(self.i0, self.grid_deg)

    @property
    def lat_max(self) -> float:
        return _edge(self.i1, self.grid_deg)

    @property
    def lon_min(self) -> float:
        return _edge(self.j0, self.grid_deg)

    @property
    def lon_max(self) -> float:
        return _edge(self.j1, self.grid_deg)

    @property
    def n_cells(self) -> int:
        return (self.i1 - self.i0) * (self.j1 - self.j0)

    @property
    def area_deg2(self) -> float:
        return self.n_cells * self.grid_deg ** 2

    @property
    def center(self) -> tuple[float, float]:
        return (self.lat_min + self.lat_max) / 2, (self.lon_min + self.lon_max) / 2

    def contains_cell(self, i: int, j: int) -> bool:
        return self.i0 <= i < self.i1 and self.j0 <= j < self.j1

    def to_polygon(self) -> Polygon:
        return box(self.lon_min, self.lat_min, self.lon_max, self.lat_max)


@dataclass(frozen=True)
class RectilinearRegion:
    cells: frozenset[tuple[int, int]]
    grid_deg: float

    @property
    def area_deg2(self) -> float:
        return len(self.cells) * self.grid_deg ** 2

    def contains_cell(self, i: int, j: int) -> bool:
        return (i, j) in self.cells

    def to_polygon(self):
        g = self.grid_deg
        return unary_union([box(_edge(j, g), _edge(i, g), _edge(j + 1, g), _edge(i + 1, g))
                            for i, j in self.cells])


def cell_of(lat: float, lon: float, grid_deg: float) -> tuple[int, int]:
    return math.floor(lat / grid_deg), math.floor(lon / grid_deg)


def _components(cells: set[tuple[int, int]]) -> list[frozenset[tuple[int, int]]]:
    """Edge-connected components."""
    todo = set(cells)
    out = []
    while todo:
        seed = todo.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            i, j = stack.pop()
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in todo:
                    todo.remove(nb)
                    comp.add(nb)
                    stack.append(nb)
        out.append(frozenset(comp))
    return sorted(out, key=min)


def rectilinear_cover(polygons: Sequence[Polygon], grid_deg: float = DEFAULT_GRID_DEG
                      ) -> list[RectilinearRegion]:
    """Snap each polygon's bounding box outward to the grid and union the boxes.

    The result is a set of disjoint rectilinear regions whose union contains
    every input polygon.
    """
    if not grid_deg > 0:
        raise ValueError("grid_deg must be > 0")
    cells: set[tuple[int, int]] = set()
    for poly in polygons:
        lon_min, lat_min, lon_max, lat_max = poly.bounds
        i0, j0 = math.floor(lat_min / grid_deg), math.floor(lon_min / grid_deg)
        i1, j1 = math.ceil(lat_max / grid_deg), math.ceil(lon_max / grid_deg)
        i1, j1 = max(i1, i0 + 1), max(j1, j0 + 1)
        cells.update((i, j) for i in range(i0, i1) for j in range(j0, j1))
    return [RectilinearRegion(c, grid_deg) for c in _components(cells)]


def _sweep(region: RectilinearRegion) -> list[Rect]:
    """Row-wise maximal runs, stacked vertically while the run extents match."""
    rows: dict[int, list[int]] = {}
    for i, j in region.cells:
        rows.setdefault(i, []).append(j)
    open_rects: dict[tuple[int, int], list[int]] = {}  # (j0, j1) -> [i0, i1]
    done: list[Rect] = []
    for i in sorted(rows):
        cols = sorted(rows[i])
        runs = []
        start = prev = cols[0]
        for j in cols[1:]:
            if j != prev + 1:
                runs.append((start, prev + 1))
                start = j
            prev = j
        runs.append((start, prev + 1))
        nxt = {}
        for run in runs:
            span = open_rects.pop(run, None)
            if span is not None and span[1] == i:
                span[1] = i + 1
                nxt[run] = span
            else:
                if span is not None:
                    done.append(Rect(span[0], span[1], run[0], run[1], region.grid_deg))
                nxt[run] = [i, i + 1]
        for run, span in open_rects.items():
            done.append(Rect(span[0], span[1], run[0], run[1], region.grid_deg))
        open_rects = nxt
    for run, span in open_rects.items():
        done.append(Rect(span[0], span[1], run[0], run[1], region.grid_deg))
    return done


def _join(rects: list[Rect]) -> list[Rect]:
    """Merge pairs that share a whole edge until no pair does."""
    rects = list(rects)
    changed = True
    while changed:
        changed = False
        for a in range(len(rects)):
            for b in range(a + 1, len(rects)):
                r, s = rects[a], rects[b]
                merged = None
                if (r.j0, r.j1) == (s.j0, s.j1) and (r.i1 == s.i0 or s.i1 == r.i0):
                    merged = Rect(min(r.i0, s.i0), max(r.i1, s.i1), r.j0, r.j1, r.grid_deg)
                elif (r.i0, r.i1) == (s.i0, s.i1) and (r.j1 == s.j0 or s.j1 == r.j0):
                    merged = Rect(r.i0, r.i1, min(r.j0, s.j0), max(r.j1, s.j1), r.grid_deg)
                if merged is not None:
                    rects[a] = merged
                    del rects[b]
                    changed = True
                    break
            if changed:
                break
    return rects


def _balanced_cuts(lo: int, hi: int, max_cells: int) -> list[tuple[int, int]]:
    n = hi - lo
    k = math.ceil(n / max_cells)
    base, extra = divmod(n, k)
    cuts, start = [], lo
    for p in range(k):
        size = base + (1 if p < extra else 0)
        cuts.append((start, start + size))
        start += size
    return cuts


def split_rect(rect: Rect, max_span_deg: float) -> list[Rect]:
    """Divide `rect` into near-equal pieces no wider than `max_span_deg` on either axis."""
    max_cells = math.floor(max_span_deg / rect.grid_deg + 1e-9)
    if max_cells < 1:
        raise ValueError("max_span_deg must be at least one grid cell")
    return [
        Rect(i0, i1, j0, j1, rect.grid_deg)
        for i0, i1 in _balanced_cuts(rect.i0, rect.i1, max_cells)
        for j0, j1 in _balanced_cuts(rect.j0, rect.j1, max_cells)
    ]


def join_split_rectangles(regions: Iterable[RectilinearRegion],
                          max_span_deg: float = DEFAULT_MAX_SPAN_DEG) -> list[Rect]:
    """Exact rectangle decomposition of each region, then size-limited splitting."""
    out: list[Rect] = []
    for region in regions:
        for rect in _join(_sweep(region)):
            out.extend(split_rect(rect, max_span_deg))
    return sorted(out, key=lambda r: (r.i0, r.j0))

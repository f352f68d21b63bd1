"""Gridded terrain elevations with bilinear lookup.

File format: a header line ``nrows,ncols,origin_lat,origin_lon,cell_deg,nodata``,
one line with those values, then ``nrows`` comma-separated rows of feet-MSL
elevations. Row 0 is the southernmost; values sit on grid nodes at
``(origin_lat + i * cell_deg, origin_lon + j * cell_deg)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from trackforge.errors import OutOfCoverage, SchemaMismatch

DEM_HEADER = ["nrows", "ncols", "origin_lat", "origin_lon", "cell_deg", "nodata"]
_EDGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DemGrid:
    origin_lat: float
    origin_lon: float
    cell_deg: float
    elevations: np.ndarray
    nodata: float = -9999.0

    def __post_init__(self):
        if not self.cell_deg > 0:
            raise ValueError("cell_deg must be > 0")
        if self.elevations.ndim != 2 or min(self.elevations.shape) < 1:
            raise ValueError("elevations must be a non-empty 2-D grid")

    @property
    def n_rows(self) -> int:
        return self.elevations.shape[0]

    @property
    def n_cols(self) -> int:
        return self.elevations.shape[1]

    @property
    def filled(self) -> np.ndarray:
        """Elevations with missing cells read as sea level."""
        e = self.elevations.astype(float)
        return np.where(e == self.nodata, 0.0, e)

    def _frac_index(self, coord, origin, n, name):
        x = (np.asarray(coord, dtype=float) - origin) / self.cell_deg
        if np.any(x < -_EDGE_TOL) or np.any(x > n - 1 + _EDGE_TOL):
            raise OutOfCoverage(f"{name} outside DEM coverage")
        x = np.clip(x, 0.0, n - 1)
        i0 = np.minimum(np.floor(x).astype(int), max(n - 2, 0))
        return i0, x - i0

    def elevation_at(self, lat, lon):
        """Bilinear terrain elevation (ft MSL) at the given point(s)."""
        i0, fr = self._frac_index(lat, self.origin_lat, self.n_rows, "latitude")
        j0, fc = self._frac_index(lon, self.origin_lon, self.n_cols, "longitude")
        z = self.filled
        i1 = np.minimum(i0 + 1, self.n_rows - 1)
        j1 = np.minimum(j0 + 1, self.n_cols - 1)
        south = z[i0, j0] * (1 - fc) + z[i0, j1] * fc
        north = z[i1, j0] * (1 - fc) + z[i1, j1] * fc
        out = south * (1 - fr) + north * fr
        return float(out) if np.ndim(out) == 0 else out

    def cell_bounds(self):
        """Latitude and longitude extents of the whole grid treating each node as a cell."""
        h = self.cell_deg / 2
        return (self.origin_lat - h, self.origin_lat + (self.n_rows - 1) * self.cell_deg + h,
                self.origin_lon - h, self.origin_lon + (self.n_cols - 1) * self.cell_deg + h)


def read_dem(path: str | Path) -> DemGrid:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != DEM_HEADER:
            raise SchemaMismatch(f"{path}: expected DEM header {DEM_HEADER}")
        vals = fh.readline().strip().split(",")
        nrows, ncols = int(vals[0]), int(vals[1])
        origin_lat, origin_lon, cell, nodata = map(float, vals[2:6])
        grid = np.loadtxt(fh, delimiter=",", ndmin=2)
    if grid.shape != (nrows, ncols):
        raise SchemaMismatch(f"{path}: grid shape {grid.shape} != ({nrows}, {ncols})")
    return DemGrid(origin_lat, origin_lon, cell, grid, nodata)


def write_dem(dem: DemGrid, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(DEM_HEADER) + "\n")
        fh.write(f"{dem.n_rows},{dem.n_cols},{dem.origin_lat!r},{dem.origin_lon!r},"
                 f"{dem.cell_deg!r},{dem.nodata!r}\n")
        for row in dem.elevations:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def flat_dem(lat_min, lat_max, lon_min, lon_max, cell_deg=0.01, elevation_ft=0.0) -> DemGrid:
    """Constant-elevation grid covering the given box (handy for fixtures)."""
    n_rows = int(np.ceil((lat_max - lat_min) / cell_deg)) + 1
    n_cols = int(np.ceil((lon_max - lon_min) / cell_deg)) + 1
    return DemGrid(lat_min, lon_min, cell_deg, np.full((n_rows, n_cols), float(elevation_ft)))

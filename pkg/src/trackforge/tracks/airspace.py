"""Airspace volumes and point classification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import shapely
from shapely.geometry import Polygon, mapping, shape

AIRSPACE_CLASSES = ("B", "C", "D", "other")
# lower rank = more restrictive
PRECEDENCE = {c: i for i, c in enumerate(AIRSPACE_CLASSES)}


@dataclass(frozen=True)
class AirspaceVolume:
    cls: str
    polygon: Polygon  # x = lon, y = lat
    floor_ft_agl: float
    ceiling_ft_agl: float

    def __post_init__(self):
        if self.cls not in AIRSPACE_CLASSES:
            raise ValueError(f"unknown airspace class {self.cls!r}")
        if not self.floor_ft_agl < self.ceiling_ft_agl:
            raise ValueError("floor must be below ceiling")
        if not self.polygon.is_valid or self.polygon.is_empty:
            raise ValueError("airspace polygon must be a valid, non-self-intersecting ring")


def volume(cls: str, lonlat: Sequence[tuple[float, float]], floor: float = 0.0,
           ceiling: float = 2500.0) -> AirspaceVolume:
    return AirspaceVolume(cls, Polygon(lonlat), float(floor), float(ceiling))


def classify_airspace(lat: float, lon: float, alt_agl_ft: float,
                      volumes: Sequence[AirspaceVolume]) -> str:
    return str(classify_points(np.array([lat]), np.array([lon]), np.array([alt_agl_ft]), volumes)[0])


def classify_points(lat, lon, alt_agl_ft, volumes: Sequence[AirspaceVolume]) -> np.ndarray:
    """Most restrictive class whose polygon and [floor, ceiling] contain each point."""
    lat, lon, alt = (np.asarray(a, dtype=float) for a in (lat, lon, alt_agl_ft))
    rank = np.full(lat.shape, PRECEDENCE["other"])
    for v in volumes:
        inside = shapely.intersects_xy(v.polygon, lon, lat)
        inside &= (alt >= v.floor_ft_agl) & (alt <= v.ceiling_ft_agl)
        rank = np.where(inside, np.minimum(rank, PRECEDENCE[v.cls]), rank)
    return np.array(AIRSPACE_CLASSES, dtype=object)[rank]


def read_airspace(path: str | Path) -> list[AirspaceVolume]:
    """Load a GeoJSON FeatureCollection of Polygon features."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: expected a GeoJSON FeatureCollection")
    out = []
    for feat in doc["features"]:
        props = feat["properties"]
        geom = shape(feat["geometry"])
        if geom.geom_type != "Polygon":
            raise ValueError(f"{path}: only Polygon geometries are supported")
        out.append(AirspaceVolume(props["class"], geom, float(props["floor_ft_agl"]),
                                  float(props["ceiling_ft_agl"])))
    return out


def write_airspace(volumes: Sequence[AirspaceVolume], path: str | Path) -> None:
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"class": v.cls, "floor_ft_agl": v.floor_ft_agl,
                               "ceiling_ft_agl": v.ceiling_ft_agl},
                "geometry": mapping(v.polygon),
            }
            for v in volumes
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)

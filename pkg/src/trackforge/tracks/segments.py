"""Turning per-aircraft observations into uniformly sampled track segments."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence, TypeVar

import numpy as np

from trackforge.errors import DegenerateSegment
from trackforge.geo import KT_MPS, haversine_m, initial_bearing_deg
from trackforge.tracks.airspace import AirspaceVolume, classify_points
from trackforge.tracks.dem import DemGrid

MAX_GAP_S = 300.0
MIN_POINTS = 10
RATE_HZ = 1.0

T = TypeVar("T")


@dataclass(frozen=True, eq=False)
class TrackSegment:
    track_id: str
    time_s: np.ndarray
    lat_deg: np.ndarray
    lon_deg: np.ndarray
    alt_msl_ft: np.ndarray
    heading_deg: np.ndarray | None = None
    alt_agl_ft: np.ndarray | None = None
    airspace: np.ndarray | None = None
    ground_speed_kt: np.ndarray | None = None
    vert_rate_fpm: np.ndarray | None = None
    turn_rate_deg_s: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.time_s)

    @classmethod
    def from_observations(cls, track_id: str, observations: Sequence) -> "TrackSegment":
        headings = [o.heading_deg for o in observations]
        return cls(
            track_id,
            np.array([o.time for o in observations], dtype=float),
            np.array([o.lat for o in observations], dtype=float),
            np.array([o.lon for o in observations], dtype=float),
            np.array([o.alt_msl_ft for o in observations], dtype=float),
            None if any(h is None for h in headings) else np.array(headings, dtype=float),
        )


def split_segments(observations: Sequence[T], max_gap_s: float = MAX_GAP_S) -> list[list[T]]:
    """Start a new segment wherever consecutive observations are more than `max_gap_s` apart."""
    segments: list[list[T]] = []
    for obs in observations:
        if segments and obs.time - segments[-1][-1].time <= max_gap_s:
            segments[-1].append(obs)
        else:
            segments.append([obs])
    return segments


def filter_short(segments: Sequence[Sequence[T]], min_points: int = MIN_POINTS) -> list[Sequence[T]]:
    return [s for s in segments if len(s) >= min_points]


def _circular_interp(t_new, t, deg):
    unwrapped = np.degrees(np.unwrap(np.radians(deg)))
    return np.interp(t_new, t, unwrapped) % 360.0


def interpolate(segment: TrackSegment, rate_hz: float = RATE_HZ) -> TrackSegment:
    """Linear resampling onto a uniform grid from the first timestamp.

    If the last timestamp is not on the grid it is appended, so both
    endpoints are reproduced exactly. Headings follow the shortest arc.
    """
    if len(segment) < 2:
        raise DegenerateSegment("need at least two points to interpolate")
    if not rate_hz > 0:
        raise ValueError("rate_hz must be > 0")
    t = segment.time_s
    if np.any(np.diff(t) <= 0):
        raise ValueError("segment times must be strictly increasing")
    step = 1.0 / rate_hz
    n = int(np.floor((t[-1] - t[0]) / step + 1e-9))
    grid = t[0] + step * np.arange(n + 1)
    if t[-1] - grid[-1] > 1e-9 * max(1.0, abs(t[-1])):
        grid = np.append(grid, t[-1])
    else:
        grid[-1] = t[-1]

    def lin(v):
        out = np.interp(grid, t, v)
        # exact values wherever the grid hits an original knot
        hit = np.searchsorted(t, grid)
        ok = (hit < len(t)) & (t[np.minimum(hit, len(t) - 1)] == grid)
        out[ok] = v[hit[ok]]
        return out

    heading = None
    if segment.heading_deg is not None:
        heading = _circular_interp(grid, t, segment.heading_deg)
    return TrackSegment(segment.track_id, grid, lin(segment.lat_deg), lin(segment.lon_deg),
                        lin(segment.alt_msl_ft), heading)


def agl_altitude(segment: TrackSegment, dem: DemGrid) -> TrackSegment:
    terrain = dem.elevation_at(segment.lat_deg, segment.lon_deg)
    return replace(segment, alt_agl_ft=segment.alt_msl_ft - terrain)


def _course_deg(segment: TrackSegment) -> np.ndarray:
    if segment.heading_deg is not None:
        return segment.heading_deg
    lat, lon = segment.lat_deg, segment.lon_deg
    fwd = initial_bearing_deg(lat[:-1], lon[:-1], lat[1:], lon[1:])
    return np.append(fwd, fwd[-1])


def dynamics(segment: TrackSegment) -> TrackSegment:
    """Ground speed (kt), vertical rate (ft/min) and turn rate (deg/s).

    Interior points use central differences, endpoints one-sided ones.
    """
    if len(segment) < 2:
        raise DegenerateSegment("need at least two points for rates")
    t = segment.time_s
    step = haversine_m(segment.lat_deg[:-1], segment.lon_deg[:-1],
                       segment.lat_deg[1:], segment.lon_deg[1:])
    along = np.concatenate([[0.0], np.cumsum(step)])
    speed = np.gradient(along, t) / KT_MPS
    vert = np.gradient(segment.alt_msl_ft, t) * 60.0
    course = np.degrees(np.unwrap(np.radians(_course_deg(segment))))
    turn = np.gradient(course, t)
    return replace(segment, ground_speed_kt=speed, vert_rate_fpm=vert, turn_rate_deg_s=turn)


def classify(segment: TrackSegment, volumes: Sequence[AirspaceVolume]) -> TrackSegment:
    if segment.alt_agl_ft is None:
        raise ValueError("classify needs AGL altitudes; run agl_altitude first")
    return replace(segment, airspace=classify_points(segment.lat_deg, segment.lon_deg,
                                                     segment.alt_agl_ft, volumes))

"""Per-archive processing: one leaf zip in, one CSV per surviving segment out."""

from __future__ import annotations

import csv
import io
import logging
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from trackforge.errors import CorruptArchive, TrackforgeError
from trackforge.ingest import Observation, parse_observation_csv
from trackforge.tracks.airspace import AirspaceVolume
from trackforge.tracks.dem import DemGrid
from trackforge.tracks.segments import (
    MAX_GAP_S,
    MIN_POINTS,
    RATE_HZ,
    TrackSegment,
    agl_altitude,
    classify,
    dynamics,
    filter_short,
    interpolate,
    split_segments,
)

logger = logging.getLogger(__name__)

SEGMENT_HEADER = ["time_s", "lat_deg", "lon_deg", "alt_msl_ft", "alt_agl_ft", "airspace",
                  "ground_speed_kt", "vert_rate_fpm", "turn_rate_deg_s"]


@dataclass(frozen=True)
class SegmentConfig:
    max_gap_s: float = MAX_GAP_S
    min_points: int = MIN_POINTS
    rate_hz: float = RATE_HZ


@dataclass
class SegmentStats:
    aircraft: int = 0
    aircraft_failed: int = 0
    segments_kept: int = 0
    segments_dropped: int = 0
    rows_out: int = 0
    outputs: list[str] = field(default_factory=list)


def clean_observations(observations: Sequence[Observation]) -> list[Observation]:
    """Time-sort, drop rows without altitude and keep the first of repeated timestamps."""
    out: list[Observation] = []
    for obs in sorted((o for o in observations if o.alt_msl_ft is not None), key=lambda o: o.time):
        if out and obs.time == out[-1].time:
            continue
        out.append(obs)
    return out


def process_track(track_id: str, observations: Sequence[Observation], dem: DemGrid,
                  volumes: Sequence[AirspaceVolume], config: SegmentConfig = SegmentConfig()
                  ) -> tuple[list[TrackSegment], int]:
    """Split, filter, resample and annotate one aircraft; returns (segments, n_dropped)."""
    raw = split_segments(clean_observations(observations), config.max_gap_s)
    kept = filter_short(raw, config.min_points)
    segments = []
    for k, seg in enumerate(kept):
        s = TrackSegment.from_observations(f"{track_id}_{k:03d}", seg)
        s = interpolate(s, config.rate_hz)
        s = classify(dynamics(agl_altitude(s, dem)), volumes)
        segments.append(s)
    return segments, len(raw) - len(kept)


def write_segment_csv(segment: TrackSegment, path: Path) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SEGMENT_HEADER)
        for i in range(len(segment)):
            w.writerow([
                f"{segment.time_s[i]:.3f}", f"{segment.lat_deg[i]:.7f}", f"{segment.lon_deg[i]:.7f}",
                f"{segment.alt_msl_ft[i]:.2f}", f"{segment.alt_agl_ft[i]:.2f}", segment.airspace[i],
                f"{segment.ground_speed_kt[i]:.3f}", f"{segment.vert_rate_fpm[i]:.3f}",
                f"{segment.turn_rate_deg_s[i]:.4f}",
            ])
    return len(segment)


def process_archive_task(zip_path: str | Path, dem: DemGrid, volumes: Sequence[AirspaceVolume],
                         out_dir: str | Path, config: SegmentConfig = SegmentConfig()) -> SegmentStats:
    """Process every per-aircraft file in one leaf archive.

    Output files are ``<out_dir>/<track id>_<k>.csv``. A failure on one
    aircraft is logged and counted; the rest of the archive still runs.
    """
    out_dir = Path(out_dir)
    stats = SegmentStats()
    try:
        zf = zipfile.ZipFile(zip_path)
    except (zipfile.BadZipFile, OSError) as exc:
        raise CorruptArchive(f"{zip_path}: {exc}") from exc
    with zf:
        for name in sorted(zf.namelist()):
            if not name.endswith(".csv"):
                continue
            track_id = Path(name).stem
            stats.aircraft += 1
            try:
                text = io.TextIOWrapper(io.BytesIO(zf.read(name)), newline="")
                observations, _ = parse_observation_csv(text, f"{zip_path}:{name}")
                segments, dropped = process_track(track_id, observations, dem, volumes, config)
            except (TrackforgeError, ValueError, zipfile.BadZipFile) as exc:
                logger.warning("%s:%s failed: %s", zip_path, name, exc)
                stats.aircraft_failed += 1
                continue
            stats.segments_dropped += dropped
            for seg in segments:
                path = out_dir / f"{seg.track_id}.csv"
                stats.rows_out += write_segment_csv(seg, path)
                stats.outputs.append(path.name)
                stats.segments_kept += 1
    return stats

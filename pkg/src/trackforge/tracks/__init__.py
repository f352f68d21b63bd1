"""Track segmentation, resampling, terrain-relative altitude and airspace class."""

from trackforge.tracks.airspace import AirspaceVolume, classify_airspace, read_airspace, volume
from trackforge.tracks.dem import DemGrid, flat_dem, read_dem, write_dem
from trackforge.tracks.process import SegmentConfig, SegmentStats, process_archive_task
from trackforge.tracks.segments import (
    TrackSegment,
    agl_altitude,
    classify,
    dynamics,
    filter_short,
    interpolate,
    split_segments,
)

__all__ = [
    "AirspaceVolume", "DemGrid", "SegmentConfig", "SegmentStats", "TrackSegment",
    "agl_altitude", "classify", "classify_airspace", "dynamics", "filter_short", "flat_dem",
    "interpolate", "process_archive_task", "read_airspace", "read_dem", "split_segments",
    "volume", "write_dem",
]

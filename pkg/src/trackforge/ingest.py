"""Organize raw observations into a per-aircraft hierarchy and archive its leaves.

Directory layout of the organized tree::

    <year>/<aircraft type>/<seat bucket>/<leaf>/<icao24>.csv

where ``leaf`` is the first two hex digits of the ICAO 24-bit address.
Addresses missing from the registry go to ``<year>/unknown/_/xx``. The
archive tree keeps the first three levels and replaces each leaf directory
with ``<leaf>.zip``.
"""

from __future__ import annotations

import csv
import logging
import os
import re
import warnings
import zipfile
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from trackforge.errors import PartialArchive, SchemaMismatch, UnreadableFile
from trackforge.sched.config import ProtocolConfig
from trackforge.sched.live import run_tasks
from trackforge.sched.tasks import OrderingPolicy, Task
from trackforge.sched.trace import ScheduleTrace

logger = logging.getLogger(__name__)

REGISTRY_HEADER = ["icao24", "type", "seats", "expiration"]
OBSERVATION_HEADER = ["time", "icao24", "lat", "lon", "alt_msl_ft",
                      "ground_speed_kt", "heading_deg", "vert_rate_fpm"]
AIRCRAFT_TYPES = ("fixed_wing_single", "fixed_wing_multi", "rotorcraft", "glider", "balloon", "other")
# (low, high, name); high None = open ended
SEAT_BUCKETS = ((0, 0, "0"), (1, 1, "1"), (2, 3, "2-3"), (4, 9, "4-9"), (10, 50, "10-50"), (51, None, "51+"))
UNKNOWN_TYPE, UNKNOWN_SEATS, UNKNOWN_LEAF = "unknown", "_", "xx"

ICAO_RE = re.compile(r"^[0-9a-f]{6}$")
HOUR_KEY_RE = re.compile(r"(\d{4})-(\d{2})-(\d{2})-(\d{2})")
ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


@dataclass(frozen=True)
class RegistryRecord:
    icao24: str
    aircraft_type: str
    seats: int
    expiration: date


@dataclass(frozen=True)
class Observation:
    time: float
    icao24: str
    lat: float
    lon: float
    alt_msl_ft: float | None = None
    ground_speed_kt: float | None = None
    heading_deg: float | None = None
    vert_rate_fpm: float | None = None

    @property
    def year(self) -> int:
        return datetime.fromtimestamp(self.time, tz=timezone.utc).year


@dataclass(frozen=True)
class HierarchyPath:
    year: int
    type_dir: str
    seat_dir: str
    leaf_dir: str

    def parts(self) -> tuple[str, str, str, str]:
        return str(self.year), self.type_dir, self.seat_dir, self.leaf_dir

    def __str__(self):
        return "/".join(self.parts())


@dataclass(frozen=True)
class Reject:
    file: str
    line: int
    reason: str


# --- registry --------------------------------------------------------------

def _parse_registry_row(row: dict) -> RegistryRecord:
    icao = row["icao24"].strip().lower()
    if not ICAO_RE.match(icao):
        raise ValueError(f"bad icao24 {row['icao24']!r}")
    kind = row["type"].strip()
    if kind not in AIRCRAFT_TYPES:
        raise ValueError(f"unknown aircraft type {kind!r}")
    seats = int(row["seats"])
    if seats < 0:
        raise ValueError("negative seat count")
    return RegistryRecord(icao, kind, seats, date.fromisoformat(row["expiration"].strip()))


def parse_registry(files: Iterable[str | Path]) -> tuple[dict[str, RegistryRecord], list[Reject]]:
    """Read registry CSVs; return records keyed by icao24 plus rejected rows.

    Duplicate addresses keep the record with the latest expiration.
    """
    records: dict[str, RegistryRecord] = {}
    rejects: list[Reject] = []
    for path in files:
        try:
            fh = open(path, newline="")
        except OSError as exc:
            raise UnreadableFile(f"cannot read registry {path}: {exc}") from exc
        with fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != REGISTRY_HEADER:
                raise SchemaMismatch(f"{path}: expected header {REGISTRY_HEADER}, got {reader.fieldnames}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    rec = _parse_registry_row(row)
                except (ValueError, TypeError, AttributeError) as exc:
                    rejects.append(Reject(str(path), lineno, str(exc)))
                    continue
                old = records.get(rec.icao24)
                if old is None or rec.expiration > old.expiration:
                    records[rec.icao24] = rec
    return records, rejects


# --- hierarchy -------------------------------------------------------------

def seat_bucket(seats: int) -> str:
    for lo, hi, name in SEAT_BUCKETS:
        if seats >= lo and (hi is None or seats <= hi):
            return name
    raise ValueError(f"invalid seat count {seats}")


def hierarchy_path(record: RegistryRecord | None, year: int) -> HierarchyPath:
    if record is None:
        return HierarchyPath(year, UNKNOWN_TYPE, UNKNOWN_SEATS, UNKNOWN_LEAF)
    return HierarchyPath(year, record.aircraft_type, seat_bucket(record.seats), record.icao24[:2])


# --- observations ----------------------------------------------------------

def _opt(value: str) -> float | None:
    value = value.strip()
    return float(value) if value else None


def parse_observation_row(row: Sequence[str]) -> Observation:
    if len(row) != len(OBSERVATION_HEADER):
        raise ValueError(f"expected {len(OBSERVATION_HEADER)} fields, got {len(row)}")
    t = float(row[0])
    icao = row[1].strip().lower()
    lat, lon = float(row[2]), float(row[3])
    if not (t == t and abs(t) != float("inf")):
        raise ValueError("non-finite time")
    if not ICAO_RE.match(icao):
        raise ValueError(f"bad icao24 {row[1]!r}")
    if not -90 <= lat <= 90 or not -180 <= lon < 180:
        raise ValueError("position out of range")
    return Observation(t, icao, lat, lon, *(_opt(v) for v in row[4:]))


def parse_observation_csv(lines: Iterable[str], source: str = "<stream>") -> tuple[list[Observation], int]:
    """Parse observation CSV text; return valid rows and the count of invalid ones."""
    rows, invalid = [], 0
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != OBSERVATION_HEADER:
        raise SchemaMismatch(f"{source}: expected header {OBSERVATION_HEADER}, got {header}")
    for raw in reader:
        if not raw:
            continue
        try:
            rows.append(parse_observation_row(raw))
        except ValueError:
            invalid += 1
    return rows, invalid


def read_observations(path: str | Path) -> tuple[list[Observation], int]:
    with open(path, newline="") as fh:
        return parse_observation_csv(fh, str(path))


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def observation_row(obs: Observation) -> list[str]:
    return [_fmt(obs.time), obs.icao24, _fmt(obs.lat), _fmt(obs.lon), _fmt(obs.alt_msl_ft),
            _fmt(obs.ground_speed_kt), _fmt(obs.heading_deg), _fmt(obs.vert_rate_fpm)]


def write_observations(observations: Iterable[Observation], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(OBSERVATION_HEADER)
        for obs in observations:
            writer.writerow(observation_row(obs))


# --- organize --------------------------------------------------------------

@dataclass
class OrganizeStats:
    files_read: int = 0
    files_failed: int = 0
    rows_total: int = 0
    rows_kept: int = 0
    rows_unmatched: int = 0
    rows_dropped_ceiling: int = 0
    rows_invalid: int = 0
    aircraft_files: int = 0
    failed_files: list[str] = field(default_factory=list)


def _sort_key(obs: Observation):
    return (obs.time, tuple(observation_row(obs)))


def organize(
    observation_files: Sequence[str | Path],
    registry: dict[str, RegistryRecord],
    out_root: str | Path,
    ceiling_ft: float | None = None,
    n_workers: int = 1,
    distribution: str = "self_sched",
    pcfg: ProtocolConfig | None = None,
    policy: OrderingPolicy | None = None,
) -> tuple[OrganizeStats, ScheduleTrace]:
    """Sort observations into one time-ordered file per (aircraft, year).

    Each input file is one task. The written tree depends only on the input
    rows, never on the schedule.
    """
    out_root = Path(out_root)
    tasks = file_tasks(observation_files)
    paths = {t.id: Path(p) for t, p in zip(tasks, observation_files)}

    def parse(task: Task):
        try:
            return read_observations(paths[task.id])
        except (OSError, SchemaMismatch, UnicodeDecodeError) as exc:
            logger.warning("skipping %s: %s", paths[task.id], exc)
            return exc

    results, trace = run_tasks(tasks, parse, n_workers, distribution, pcfg, policy)

    stats = OrganizeStats()
    groups: dict[tuple[str, int], list[Observation]] = {}
    for tid in sorted(results):
        out = results[tid]
        if isinstance(out, Exception):
            stats.files_failed += 1
            stats.failed_files.append(str(paths[tid]))
            continue
        rows, invalid = out
        stats.files_read += 1
        stats.rows_invalid += invalid
        stats.rows_total += invalid + len(rows)
        for obs in rows:
            if ceiling_ft is not None and obs.alt_msl_ft is not None and obs.alt_msl_ft > ceiling_ft:
                stats.rows_dropped_ceiling += 1
                continue
            if obs.icao24 in registry:
                stats.rows_kept += 1
            else:
                stats.rows_unmatched += 1
            groups.setdefault((obs.icao24, obs.year), []).append(obs)

    for (icao, year), rows in sorted(groups.items()):
        hp = hierarchy_path(registry.get(icao), year)
        write_observations(sorted(rows, key=_sort_key), out_root.joinpath(*hp.parts(), f"{icao}.csv"))
        stats.aircraft_files += 1
    return stats, trace


# --- archive ---------------------------------------------------------------

@dataclass
class ArchiveReport:
    archived: list[str] = field(default_factory=list)
    empty: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)


def leaf_dirs(root: str | Path) -> list[Path]:
    """Directories exactly four levels below `root`, in sorted order."""
    root = Path(root)
    return sorted(p for p in root.glob("*/*/*/*") if p.is_dir())


def write_deterministic_zip(files: Sequence[Path], zip_path: Path) -> None:
    """Zip `files` under their bare names, sorted, with fixed metadata."""
    zip_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = zip_path.with_name(zip_path.name + ".part")
    with zipfile.ZipFile(tmp, "w") as zf:
        for f in sorted(files, key=lambda p: p.name):
            info = zipfile.ZipInfo(f.name, date_time=ZIP_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.create_system = 3
            info.external_attr = 0o644 << 16
            zf.writestr(info, f.read_bytes())
    os.replace(tmp, zip_path)


def archive_leaves(
    organized_root: str | Path,
    archive_root: str | Path,
    strict: bool = False,
    n_workers: int = 1,
    distribution: str = "self_sched",
    pcfg: ProtocolConfig | None = None,
    policy: OrderingPolicy | None = None,
) -> tuple[ArchiveReport, ScheduleTrace]:
    """Zip every leaf directory into a mirrored three-level archive tree.

    One task per leaf, in filename order. Failed leaves are listed in the
    report; with ``strict=True`` they raise PartialArchive after all leaves ran.
    """
    organized_root, archive_root = Path(organized_root), Path(archive_root)
    leaves = leaf_dirs(organized_root)
    tasks = [
        Task(i, sum(f.stat().st_size for f in leaf.iterdir() if f.is_file()), None,
             leaf.relative_to(organized_root).as_posix())
        for i, leaf in enumerate(leaves)
    ]

    def archive_one(task: Task):
        leaf = leaves[task.id]
        rel = leaf.relative_to(organized_root)
        files = [f for f in leaf.iterdir() if f.is_file()]
        if not files:
            return "empty", rel.as_posix(), None
        try:
            write_deterministic_zip(files, archive_root / rel.parent / f"{rel.name}.zip")
        except OSError as exc:
            return "failed", rel.as_posix(), str(exc)
        return "archived", rel.as_posix(), None

    results, trace = run_tasks(tasks, archive_one, n_workers, distribution, pcfg, policy)
    report = ArchiveReport()
    for tid in sorted(results):
        status, rel, err = results[tid]
        if status == "archived":
            report.archived.append(rel)
        elif status == "empty":
            report.empty.append(rel)
        else:
            report.failed[rel] = err
    if strict and report.failed:
        raise PartialArchive(report)
    return report, trace


# --- task manifests --------------------------------------------------------

def hour_key(name: str) -> datetime | None:
    m = HOUR_KEY_RE.search(name)
    if not m:
        return None
    y, mo, d, h = map(int, m.groups())
    try:
        return datetime(y, mo, d, h, tzinfo=timezone.utc)
    except ValueError:
        return None


def file_tasks(paths: Sequence[str | Path]) -> list[Task]:
    """One task per path in the given order: filesystem size and hour key from the name."""
    tasks = []
    for i, p in enumerate(paths):
        p = Path(p)
        try:
            size = p.stat().st_size
        except OSError:
            size = 0
        tasks.append(Task(i, size, hour_key(p.name), p.parent.name or None))
    return tasks


def make_tasks(root: str | Path) -> tuple[list[Task], list[Path]]:
    """Tasks for every file under `root` in filename-sorted order.

    Returns the tasks and the matching paths. ``group_key`` is the leaf path
    relative to `root` (for a zip, its path without the extension).
    """
    root = Path(root)
    files = sorted((p for p in root.rglob("*") if p.is_file()),
                   key=lambda p: p.relative_to(root).as_posix())
    if not files:
        warnings.warn(f"no files under {root}; empty manifest", stacklevel=2)
    tasks = []
    for i, p in enumerate(files):
        rel = p.relative_to(root)
        group = rel.with_suffix("").as_posix() if p.suffix == ".zip" else rel.parent.as_posix()
        tasks.append(Task(i, p.stat().st_size, hour_key(p.name), group))
    return tasks, files

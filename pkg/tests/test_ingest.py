import csv
import hashlib
import io
import zipfile
from datetime import date, datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import REGISTRY_ROWS, T0, golden_raw, obs_line, write_obs, write_registry
from trackforge.errors import PartialArchive, SchemaMismatch, UnreadableFile
from trackforge.ingest import (
    AIRCRAFT_TYPES,
    RegistryRecord,
    archive_leaves,
    hierarchy_path,
    hour_key,
    make_tasks,
    organize,
    parse_observation_csv,
    parse_registry,
    read_observations,
    seat_bucket,
)
from trackforge.sched import ProtocolConfig

FAST = ProtocolConfig(poll_interval_s=0.001)


def tree_snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


# registry

def test_registry_dedup_latest_wins(tmp_path):
    f = write_registry(tmp_path / "r.csv", [("a1b2c3", "glider", 1, "2019-05-01"),
                                            ("A1B2C3", "balloon", 2, "2021-05-01"),
                                            ("a1b2c3", "other", 3, "2020-05-01")])
    records, rejects = parse_registry([f])
    assert rejects == []
    assert records == {"a1b2c3": RegistryRecord("a1b2c3", "balloon", 2, date(2021, 5, 1))}


def test_registry_rejects_bad_rows(tmp_path):
    f = write_registry(tmp_path / "r.csv", [("XYZ", "glider", 1, "2019-05-01"),
                                            ("b2c3d4", "blimp", 1, "2019-05-01"),
                                            ("c3d4e5", "glider", -1, "2019-05-01"),
                                            ("d4e5f6", "glider", 1, "2019-05-01")])
    records, rejects = parse_registry([f])
    assert list(records) == ["d4e5f6"]
    assert [r.line for r in rejects] == [2, 3, 4]


def test_registry_empty_and_errors(tmp_path):
    assert parse_registry([write_registry(tmp_path / "e.csv", [])]) == ({}, [])
    bad = tmp_path / "bad.csv"
    bad.write_text("icao,kind\n")
    with pytest.raises(SchemaMismatch):
        parse_registry([bad])
    with pytest.raises(UnreadableFile):
        parse_registry([tmp_path / "missing.csv"])


# hierarchy

def test_hierarchy_example():
    rec = RegistryRecord("a1b2c3", "rotorcraft", 4, date(2020, 1, 1))
    assert str(hierarchy_path(rec, 2019)) == "2019/rotorcraft/4-9/a1"
    assert hierarchy_path(RegistryRecord("a1b2c3", "glider", 0, date(2020, 1, 1)), 2019).seat_dir == "0"
    assert str(hierarchy_path(None, 2020)) == "2020/unknown/_/xx"


@pytest.mark.parametrize("seats,bucket", [(0, "0"), (1, "1"), (2, "2-3"), (3, "2-3"), (4, "4-9"),
                                          (9, "4-9"), (10, "10-50"), (50, "10-50"), (51, "51+"), (900, "51+")])
def test_seat_buckets(seats, bucket):
    assert seat_bucket(seats) == bucket


@settings(max_examples=30)
@given(st.lists(st.tuples(st.integers(0, 2**24 - 1), st.sampled_from(AIRCRAFT_TYPES),
                          st.integers(0, 1000), st.integers(1990, 2030)), max_size=3000))
def test_at_most_1000_dirs_per_level(records):
    paths = [hierarchy_path(RegistryRecord(f"{a:06x}", t, s, date(2030, 1, 1)), y) for a, t, s, y in records]
    paths.append(hierarchy_path(None, 2019))
    # distinct children under any single parent, at every level
    for depth in range(1, 5):
        children = {}
        for p in paths:
            parts = p.parts()
            children.setdefault(parts[:depth - 1], set()).add(parts[depth - 1])
        assert all(len(c) <= 1000 for c in children.values())


# observations and organize

def test_observation_parsing_counts_invalid():
    text = io.StringIO("time,icao24,lat,lon,alt_msl_ft,ground_speed_kt,heading_deg,vert_rate_fpm\n"
                       "1,a1b2c3,40,-75,1000,,,\n"
                       "2,a1b2c3,95,-75,1000,,,\n"
                       "x,a1b2c3,40,-75,1000,,,\n"
                       "3,a1b2c3,40,180,,,,\n"
                       "4,a1b2c3,40,-75,,,,\n")
    rows, invalid = parse_observation_csv(text)
    assert invalid == 3
    assert [r.time for r in rows] == [1.0, 4.0]
    assert rows[1].alt_msl_ft is None


@pytest.fixture
def registry(tmp_path):
    return parse_registry([write_registry(tmp_path / "reg.csv", REGISTRY_ROWS)])[0]


def test_organize_groups_and_sorts(tmp_path, registry):
    raw = tmp_path / "raw"
    raw.mkdir()
    files = golden_raw(raw)
    stats, _ = organize(files, registry, tmp_path / "org", n_workers=2, pcfg=FAST)
    out = sorted(p.relative_to(tmp_path / "org").as_posix() for p in (tmp_path / "org").rglob("*.csv"))
    assert out == ["2019/fixed_wing_multi/4-9/c3/c3d4e5.csv",
                   "2019/fixed_wing_single/2-3/b2/b2c3d4.csv",
                   "2019/rotorcraft/4-9/a1/a1b2c3.csv"]
    for p in (tmp_path / "org").rglob("*.csv"):
        rows, _ = read_observations(p)
        times = [r.time for r in rows]
        assert times == sorted(times)
    assert stats.files_read == 2 and stats.rows_kept == 64 and stats.rows_unmatched == 0


def test_organize_unmatched_ceiling_and_conservation(tmp_path, registry):
    f = write_obs(tmp_path / "in.csv", [
        obs_line(T0, "a1b2c3", 40, -75, 1000),
        obs_line(T0 + 1, "a1b2c3", 40, -75, 12000),
        obs_line(T0 + 2, "ffffff", 40, -75, 500),
        obs_line(T0 + 3, "a1b2c3", 99, -75, 500),
        obs_line(T0 + 4, "a1b2c3", 40, -75, ""),
    ])
    missing = tmp_path / "gone.csv"
    stats, _ = organize([f, missing], registry, tmp_path / "org", ceiling_ft=10_000)
    assert stats.rows_dropped_ceiling == 1
    assert stats.rows_unmatched == 1
    assert stats.rows_invalid == 1
    assert stats.rows_kept == 2
    assert stats.rows_kept + stats.rows_dropped_ceiling + stats.rows_unmatched + stats.rows_invalid == stats.rows_total == 5
    assert stats.files_failed == 1 and stats.files_read == 1
    assert (tmp_path / "org/2019/unknown/_/xx/ffffff.csv").exists()


def test_organize_year_split(tmp_path, registry):
    new_year = int(datetime(2020, 1, 1, tzinfo=timezone.utc).timestamp())
    f = write_obs(tmp_path / "in.csv", [obs_line(new_year - 1, "a1b2c3", 40, -75, 1000),
                                        obs_line(new_year, "a1b2c3", 40, -75, 1000)])
    organize([f], registry, tmp_path / "org")
    assert (tmp_path / "org/2019/rotorcraft/4-9/a1/a1b2c3.csv").exists()
    assert (tmp_path / "org/2020/rotorcraft/4-9/a1/a1b2c3.csv").exists()


@pytest.mark.parametrize("dist", ["block", "cyclic", "self_sched"])
def test_organize_idempotent_across_schedules(tmp_path, registry, dist):
    raw = tmp_path / "raw"
    raw.mkdir()
    files = golden_raw(raw)
    organize(files, registry, tmp_path / "ref", pcfg=FAST)
    organize(files, registry, tmp_path / "a", n_workers=3, distribution=dist, pcfg=FAST)
    organize(files, registry, tmp_path / "a", n_workers=2, distribution=dist, pcfg=FAST)
    assert tree_snapshot(tmp_path / "a") == tree_snapshot(tmp_path / "ref")


# archive

def test_archive_entry_order_empty_leaf_and_rerun(tmp_path):
    org = tmp_path / "org"
    leaf = org / "2019/glider/1/ab"
    leaf.mkdir(parents=True)
    (leaf / "b.csv").write_text("b\n")
    (leaf / "a.csv").write_text("a\n")
    (org / "2019/glider/1/cd").mkdir()
    report, _ = archive_leaves(org, tmp_path / "arc")
    assert report.archived == ["2019/glider/1/ab"]
    assert report.empty == ["2019/glider/1/cd"]
    zpath = tmp_path / "arc/2019/glider/1/ab.zip"
    with zipfile.ZipFile(zpath) as zf:
        assert zf.namelist() == ["a.csv", "b.csv"]
    first = hashlib.sha256(zpath.read_bytes()).hexdigest()
    archive_leaves(org, tmp_path / "arc", n_workers=2, pcfg=FAST)
    assert hashlib.sha256(zpath.read_bytes()).hexdigest() == first
    assert not (tmp_path / "arc/2019/glider/1/cd.zip").exists()


def test_archive_round_trip(tmp_path, registry):
    raw = tmp_path / "raw"
    raw.mkdir()
    organize(golden_raw(raw), registry, tmp_path / "org", pcfg=FAST)
    archive_leaves(tmp_path / "org", tmp_path / "arc", pcfg=FAST)
    restored = {}
    for z in (tmp_path / "arc").rglob("*.zip"):
        rel = z.relative_to(tmp_path / "arc").with_suffix("")
        with zipfile.ZipFile(z) as zf:
            for name in zf.namelist():
                restored[f"{rel.as_posix()}/{name}"] = zf.read(name)
    assert restored == tree_snapshot(tmp_path / "org")


def test_archive_strict_raises_on_failure(tmp_path):
    org = tmp_path / "org"
    leaf = org / "2019/glider/1/ab"
    leaf.mkdir(parents=True)
    (leaf / "a.csv").write_text("a\n")
    blocker = tmp_path / "arc/2019/glider"
    blocker.parent.mkdir(parents=True)
    blocker.write_text("not a directory")
    report, _ = archive_leaves(org, tmp_path / "arc")
    assert list(report.failed) == ["2019/glider/1/ab"]
    with pytest.raises(PartialArchive):
        archive_leaves(org, tmp_path / "arc", strict=True)


# manifests

def test_make_tasks_hour_files(tmp_path):
    for h in (2, 0, 1):
        (tmp_path / f"2018-02-05-{h:02d}.csv").write_text("x" * (h + 1))
    tasks, files = make_tasks(tmp_path)
    assert [f.name for f in files] == ["2018-02-05-00.csv", "2018-02-05-01.csv", "2018-02-05-02.csv"]
    assert [t.size_bytes for t in tasks] == [1, 2, 3]
    assert tasks[1].time_key == datetime(2018, 2, 5, 1, tzinfo=timezone.utc)
    assert hour_key("no-date.csv") is None


def test_make_tasks_zip_tree_groups(tmp_path, registry):
    raw = tmp_path / "raw"
    raw.mkdir()
    organize(golden_raw(raw), registry, tmp_path / "org", pcfg=FAST)
    archive_leaves(tmp_path / "org", tmp_path / "arc", pcfg=FAST)
    tasks, _ = make_tasks(tmp_path / "arc")
    keys = [t.group_key for t in tasks]
    assert keys == sorted(keys)
    assert keys[0] == "2019/fixed_wing_multi/4-9/c3"


def test_make_tasks_empty_warns(tmp_path):
    with pytest.warns(UserWarning):
        assert make_tasks(tmp_path) == ([], [])

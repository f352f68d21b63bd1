"""Small synthetic inputs shared by the ingest, tracks and acceptance tests."""

import math
from pathlib import Path

from trackforge.ingest import OBSERVATION_HEADER, REGISTRY_HEADER

T0 = 1_546_300_800  # 2019-01-01T00:00:00Z


def write_registry(path: Path, rows) -> Path:
    lines = [",".join(REGISTRY_HEADER)] + [",".join(map(str, r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def obs_line(t, icao, lat, lon, alt, gs="", hdg="", vr=""):
    return ",".join(str(v) for v in (t, icao, lat, lon, alt, gs, hdg, vr))


def write_obs(path: Path, lines) -> Path:
    path.write_text("\n".join([",".join(OBSERVATION_HEADER), *lines]) + "\n")
    return path


def straight_track(icao, n, t0=T0, dt=10.0, lat0=40.0, lon0=-75.0, climb_fpm=600.0,
                   alt0=1500.0, speed_kt=90.0):
    """Eastbound track with constant climb and speed, sampled every `dt` seconds."""
    out = []
    dlon_per_s = speed_kt * 1852 / 3600 / (111_195.0 * math.cos(math.radians(lat0)))
    for k in range(n):
        t = t0 + k * dt
        out.append(obs_line(t, icao, lat0, lon0 + dlon_per_s * k * dt,
                            alt0 + climb_fpm / 60 * k * dt, speed_kt, 90.0, climb_fpm))
    return out


REGISTRY_ROWS = [
    ("a1b2c3", "rotorcraft", 4, "2021-01-01"),
    ("b2c3d4", "fixed_wing_single", 2, "2022-06-30"),
    ("c3d4e5", "fixed_wing_multi", 8, "2023-03-01"),
]


def golden_raw(dirpath: Path):
    """Two hour-files holding three aircraft; c3d4e5 has only nine observations."""
    a = straight_track("a1b2c3", 30, lat0=40.0)
    b = straight_track("b2c3d4", 25, lat0=40.2, climb_fpm=-300.0, alt0=4000.0)
    c = straight_track("c3d4e5", 9, lat0=40.4)
    f1 = write_obs(dirpath / "2019-01-01-00.csv", a[:15] + b[:12] + c[:4])
    f2 = write_obs(dirpath / "2019-01-01-01.csv", b[12:] + a[15:] + c[4:])
    return [f1, f2]

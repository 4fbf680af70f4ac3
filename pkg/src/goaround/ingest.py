"""Parsing and cleaning of the three input datasets.

Input files are CSV:
  tracks.csv   flight_id,origin,dest,t,x_nm,y_nm,alt_ft
  flights.csv  flight_id,airport,sched_out,act_out,act_off,act_on,sched_on
  weather.csv  minute,vmc,ceiling_ft,visibility_nmi,temp,wind_deg,wind_kt,arr_rwys,dep_rwys,config_id

Positions are in a local tangent plane (NM) centered on the radar site.
Ceiling and visibility are clipped at parse time (10,000 ft / 10 NM).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .types import AIRPORTS, FlightRecord, IngestError, RadarTrack, WeatherRecord

CEILING_CAP_FT = 10_000.0
VISIBILITY_CAP_NMI = 10.0

TRACK_COLUMNS = ["flight_id", "origin", "dest", "t", "x_nm", "y_nm", "alt_ft"]
FLIGHT_COLUMNS = ["flight_id", "airport", "sched_out", "act_out", "act_off",
                  "act_on", "sched_on"]
WEATHER_COLUMNS = ["minute", "vmc", "ceiling_ft", "visibility_nmi", "temp",
                   "wind_deg", "wind_kt", "arr_rwys", "dep_rwys", "config_id"]


@dataclass(frozen=True)
class RadarConfig:
    radius_nm: float = 45.0
    airports: tuple = AIRPORTS


@dataclass(frozen=True)
class ClockConfig:
    """Local clock handling: one fixed UTC offset, no DST table."""

    utc_offset_min: int = 0

    def local_minute_of_day(self, minute: int) -> int:
        return (minute + self.utc_offset_min) % 1440


@dataclass
class TrackParseResult:
    tracks: list
    nonmonotone_discarded: int = 0


def _require_columns(df: pd.DataFrame, expected: Sequence[str], name: str) -> None:
    if list(df.columns) != list(expected):
        raise IngestError(
            f"{name}: expected header {','.join(expected)}, got {','.join(map(str, df.columns))}"
        )


def _first_bad_row(mask: np.ndarray) -> int:
    """1-based file line number (header is line 1) of the first bad row."""
    return int(np.flatnonzero(mask)[0]) + 2


def parse_tracks(source, radar_cfg: RadarConfig = RadarConfig()) -> TrackParseResult:
    """Parse tracks.csv into cleaned RadarTracks.

    Points beyond the radar radius are dropped; flights reduced below two
    points are discarded; flights with non-monotone timestamps among the
    retained points are discarded and counted as warnings; flights with
    neither origin nor destination in the configured airport set are
    discarded.
    """
    df = pd.read_csv(source, dtype={"flight_id": str, "origin": str, "dest": str},
                     keep_default_na=False, na_values=[""])
    _require_columns(df, TRACK_COLUMNS, "tracks.csv")
    for col in ("t", "x_nm", "y_nm", "alt_ft"):
        vals = pd.to_numeric(df[col], errors="coerce")
        bad = vals.isna().to_numpy()
        if bad.any():
            raise IngestError(f"tracks.csv: malformed value in column {col} "
                              f"at row {_first_bad_row(bad)}")
        df[col] = vals.astype(np.float64)
    if df["alt_ft"].lt(0).any():
        bad = df["alt_ft"].lt(0).to_numpy()
        raise IngestError(f"tracks.csv: negative altitude at row {_first_bad_row(bad)}")

    in_range = (np.hypot(df["x_nm"].to_numpy(), df["y_nm"].to_numpy())
                <= radar_cfg.radius_nm)
    airports = set(radar_cfg.airports)

    tracks = []
    discarded = 0
    # groupby(sort=False) preserves the file's row order within each flight
    for (fid, origin, dest), grp in df.groupby(
            ["flight_id", "origin", "dest"], sort=False):
        if origin not in airports and dest not in airports:
            continue
        keep = in_range[grp.index.to_numpy()]
        if keep.sum() < 2:
            continue
        t = grp["t"].to_numpy()[keep]
        if not np.all(np.diff(t) > 0):
            discarded += 1
            continue
        tracks.append(RadarTrack(
            flight_id=fid, origin=origin, destination=dest,
            t=t,
            x=grp["x_nm"].to_numpy()[keep],
            y=grp["y_nm"].to_numpy()[keep],
            alt=grp["alt_ft"].to_numpy()[keep],
        ))
    return TrackParseResult(tracks=tracks, nonmonotone_discarded=discarded)


def _opt_seconds(val) -> Optional[float]:
    if val is None or (isinstance(val, float) and math.isnan(val)):
        return None
    return float(val)


def parse_flights(source) -> list:
    """Parse flights.csv; empty fields become None."""
    df = pd.read_csv(source, dtype={"flight_id": str, "airport": str},
                     keep_default_na=False, na_values=[""])
    _require_columns(df, FLIGHT_COLUMNS, "flights.csv")
    for col in FLIGHT_COLUMNS[2:]:
        vals = pd.to_numeric(df[col], errors="coerce")
        bad = vals.isna().to_numpy() & df[col].notna().to_numpy()
        if bad.any():
            raise IngestError(f"flights.csv: malformed value in column {col} "
                              f"at row {_first_bad_row(bad)}")
        df[col] = vals
    records = []
    for row in df.itertuples(index=False):
        records.append(FlightRecord(
            flight_id=row.flight_id, airport=row.airport,
            sched_gate_out=_opt_seconds(row.sched_out),
            act_gate_out=_opt_seconds(row.act_out),
            act_wheels_off=_opt_seconds(row.act_off),
            act_wheels_on=_opt_seconds(row.act_on),
            sched_wheels_on=_opt_seconds(row.sched_on),
        ))
    return records


def parse_weather(source) -> list:
    """Parse weather.csv, clipping ceiling/visibility to their caps."""
    df = pd.read_csv(source, dtype={"config_id": str},
                     keep_default_na=False, na_values=[""])
    _require_columns(df, WEATHER_COLUMNS, "weather.csv")
    numeric = ["minute", "vmc", "ceiling_ft", "visibility_nmi", "wind_deg",
               "wind_kt", "arr_rwys", "dep_rwys"]
    for col in numeric:
        vals = pd.to_numeric(df[col], errors="coerce")
        bad = vals.isna().to_numpy()
        if bad.any():
            raise IngestError(f"weather.csv: malformed value in column {col} "
                              f"at row {_first_bad_row(bad)}")
        df[col] = vals
    temp = pd.to_numeric(df["temp"], errors="coerce")
    bad = temp.isna().to_numpy() & df["temp"].notna().to_numpy() & (df["temp"] != "").to_numpy()
    if bad.any():
        raise IngestError(f"weather.csv: malformed value in column temp "
                          f"at row {_first_bad_row(bad)}")

    records = []
    for i, row in enumerate(df.itertuples(index=False)):
        t = temp.iloc[i]
        records.append(WeatherRecord(
            minute=int(row.minute),
            vmc=bool(int(row.vmc)),
            ceiling=min(float(row.ceiling_ft), CEILING_CAP_FT),
            visibility=min(float(row.visibility_nmi), VISIBILITY_CAP_NMI),
            temperature=None if math.isnan(t) else float(t),
            wind_angle=float(row.wind_deg) % 360.0,
            wind_speed=float(row.wind_kt),
            arr_runways=int(row.arr_rwys),
            dep_runways=int(row.dep_rwys),
            config_id=row.config_id,
        ))
    return records


def interpolate_temperature(records: list) -> list:
    """Fill missing temperatures by linear interpolation over minutes.

    Records must be sorted by minute. Leading/trailing gaps copy the
    nearest present value; already-present values are left untouched.
    """
    minutes = np.array([r.minute for r in records], dtype=np.float64)
    temps = np.array([np.nan if r.temperature is None else r.temperature
                      for r in records], dtype=np.float64)
    present = ~np.isnan(temps)
    if not present.any():
        raise IngestError("temperature channel empty")
    filled = np.interp(minutes, minutes[present], temps[present])
    out = []
    for r, ok, v in zip(records, present, filled):
        if ok:
            out.append(r)
        else:
            out.append(WeatherRecord(
                minute=r.minute, vmc=r.vmc, ceiling=r.ceiling,
                visibility=r.visibility, temperature=float(v),
                wind_angle=r.wind_angle, wind_speed=r.wind_speed,
                arr_runways=r.arr_runways, dep_runways=r.dep_runways,
                config_id=r.config_id))
    return out


@dataclass
class SynchronizedDataset:
    """Minute-indexed container over the intersection of source ranges.

    A minute is complete when a WeatherRecord exists for it; incomplete
    minutes stay in the range but are dropped from downstream sampling.
    """

    minute_start: int
    minute_end: int          # inclusive
    tracks: list
    flights: list
    weather_by_minute: dict
    complete: np.ndarray     # bool, one flag per minute in range
    clock: ClockConfig = field(default_factory=ClockConfig)

    @property
    def n_minutes(self) -> int:
        return self.minute_end - self.minute_start + 1

    def usable_minutes(self) -> np.ndarray:
        return np.flatnonzero(self.complete) + self.minute_start


def _flight_minutes(rec: FlightRecord) -> list:
    vals = [rec.sched_gate_out, rec.act_gate_out, rec.act_wheels_off,
            rec.act_wheels_on, rec.sched_wheels_on]
    return [int(v // 60) for v in vals if v is not None]


def synchronize(tracks: list, flight_records: list, weather: list,
                clock_cfg: ClockConfig = ClockConfig()) -> SynchronizedDataset:
    """Combine parsed sources over the intersection of their time ranges."""
    if not tracks or not flight_records or not weather:
        raise IngestError("empty intersection of time ranges: a source is empty")
    weather = interpolate_temperature(sorted(weather, key=lambda r: r.minute))

    w_min = weather[0].minute
    w_max = weather[-1].minute
    t_min = min(int(tr.t[0] // 60) for tr in tracks)
    t_max = max(int(tr.t[-1] // 60) for tr in tracks)
    f_minutes = [m for rec in flight_records for m in _flight_minutes(rec)]
    if not f_minutes:
        raise IngestError("empty intersection of time ranges: no flight timestamps")
    f_min, f_max = min(f_minutes), max(f_minutes)

    start = max(w_min, t_min, f_min)
    end = min(w_max, t_max, f_max)
    if start > end:
        raise IngestError("empty intersection of time ranges")

    by_minute = {r.minute: r for r in weather if start <= r.minute <= end}
    complete = np.zeros(end - start + 1, dtype=bool)
    for m in by_minute:
        complete[m - start] = True
    return SynchronizedDataset(
        minute_start=start, minute_end=end, tracks=tracks,
        flights=flight_records, weather_by_minute=by_minute,
        complete=complete, clock=clock_cfg)

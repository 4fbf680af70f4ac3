"""Per-minute airport-state timeline and the 135-field feature vector.

Field layout (1-based indices):
    1        local time of day (minutes)
    2-15     SFO airborne inbound/outbound: instant, averages, variations
    16-29    same for OAK, 30-43 same for SJC
    44-55    SFO landing/departure rates and elapsed-to-previous-k times
    56-67    same for OAK, 68-79 same for SJC
    80-97    SFO landings/takeoffs by weight class over 5/10/15 min
    98-111   SFO taxi-in/taxi-out: instant, averages, variations
    112-125  SFO delay totals, thresholded counts and means (in/out)
    126-135  weather and runway configuration

Window convention: averages, rates and counts run over the trailing
window (t-w, t], inclusive of the current minute; variations compare the
instant values at t and t-w. Elapsed-to-previous-k fields look at events
strictly before minute t and are capped at ``elapsed_cap_min``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ingest import SynchronizedDataset
from .types import AIRPORTS, WEIGHT_CLASSES, FeatureVector, FlightRecord, WeatherRecord

WINDOWS = (5, 10, 15)
ELAPSED_COUNTS = (4, 8, 12)
DELAY_THRESHOLDS = (0, 10, 20, 30, 45)
LOOKBACK_MIN = 15

DEFAULT_WEIGHT_MAP = {
    "C172": "small", "PC12": "small", "BE20": "small", "SR22": "small",
    "B738": "large", "B739": "large", "A319": "large", "A320": "large",
    "E190": "large", "CRJ9": "large",
    "B744": "heavy", "B763": "heavy", "B77W": "heavy", "A332": "heavy",
}


@dataclass(frozen=True)
class FeatureField:
    index: int           # 1-based, per the published field list
    name: str
    unit: str
    window: Optional[int]
    kind: str            # instant | average | variation | rate | elapsed | count | weather


def _build_catalog() -> tuple:
    fields = []

    def add(name, unit, window, kind):
        fields.append(FeatureField(len(fields) + 1, name, unit, window, kind))

    add("time_of_day", "min", None, "instant")
    for ap in AIRPORTS:
        a = ap.lower()
        for direction in ("inbound", "outbound"):
            add(f"{a}_{direction}_count", "ac", None, "instant")
            for w in WINDOWS:
                add(f"{a}_{direction}_avg_{w}", "ac", w, "average")
            for w in WINDOWS:
                add(f"{a}_{direction}_var_{w}", "ac", w, "variation")
    for ap in AIRPORTS:
        a = ap.lower()
        for w in WINDOWS:
            add(f"{a}_landing_rate_{w}", "ac/min", w, "rate")
        for k in ELAPSED_COUNTS:
            add(f"{a}_elapsed_land_{k}", "min", None, "elapsed")
        for w in WINDOWS:
            add(f"{a}_departure_rate_{w}", "ac/min", w, "rate")
        for k in ELAPSED_COUNTS:
            add(f"{a}_elapsed_takeoff_{k}", "min", None, "elapsed")
    for move in ("landings", "takeoffs"):
        for cls in WEIGHT_CLASSES:
            for w in WINDOWS:
                add(f"sfo_{move}_{cls}_{w}", "ac", w, "count")
    for direction in ("in", "out"):
        add(f"sfo_taxi_{direction}_count", "ac", None, "instant")
        for w in WINDOWS:
            add(f"sfo_taxi_{direction}_avg_{w}", "ac", w, "average")
        for w in WINDOWS:
            add(f"sfo_taxi_{direction}_var_{w}", "ac", w, "variation")
    for direction in ("out", "in"):
        add(f"sfo_{direction}_delay_total", "min", None, "instant")
        for thr in DELAY_THRESHOLDS:
            add(f"sfo_{direction}_delayed_gt_{thr}", "ac", None, "count")
        add(f"sfo_{direction}_delay_mean", "min", None, "instant")
    add("vmc", "flag", None, "weather")
    add("ceiling_ft", "ft", None, "weather")
    add("visibility_nmi", "nmi", None, "weather")
    add("temperature", "deg", None, "weather")
    add("wind_angle_deg", "deg", None, "weather")
    add("wind_speed_kt", "kt", None, "weather")
    add("headwind_kt", "kt", None, "weather")
    add("crosswind_kt", "kt", None, "weather")
    add("arr_runways", "count", None, "weather")
    add("dep_runways", "count", None, "weather")

    if len(fields) != 135:
        raise AssertionError(f"catalog has {len(fields)} fields, expected 135")
    names = {f.name for f in fields}
    if len(names) != 135:
        raise AssertionError("catalog names are not unique")
    return tuple(fields)


CATALOG = _build_catalog()

# first index of each field group, used by reports and checked in tests
GROUP_STARTS = {
    "time": 1, "sfo_airborne": 2, "oak_airborne": 16, "sjc_airborne": 30,
    "sfo_rates": 44, "oak_rates": 56, "sjc_rates": 68,
    "weight_counts": 80, "taxi": 98, "delays": 112, "weather": 126,
}


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs for timeline construction and derived fields."""

    taxi_in_minutes: int = 10          # flights.csv has no gate-in time
    elapsed_cap_min: float = 120.0
    runway_heading_deg: float = 284.0  # SFO 28L/R
    weight_map: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHT_MAP))
    default_weight_class: str = "large"


def aircraft_type(flight_id: str) -> str:
    """Aircraft-type token: the segment after the last underscore."""
    _, _, tail = flight_id.rpartition("_")
    return tail if tail else flight_id


def weight_class(flight_id: str, cfg: FeatureConfig) -> str:
    return cfg.weight_map.get(aircraft_type(flight_id), cfg.default_weight_class)


def wind_components(wind_angle: float, wind_speed: float,
                    runway_heading: float) -> tuple:
    """(headwind, crosswind) in knots; negative headwind is a tailwind."""
    delta = math.radians(wind_angle - runway_heading)
    return wind_speed * math.cos(delta), abs(wind_speed * math.sin(delta))


def delay_minutes(record: FlightRecord, direction: str) -> Optional[float]:
    """Delay in minutes vs schedule, clamped at 0; None if unknowable.

    Departures measure the gate-out deviation, arrivals the wheels-on
    deviation.
    """
    if direction == "out":
        sched, act = record.sched_gate_out, record.act_gate_out
    elif direction == "in":
        sched, act = record.sched_wheels_on, record.act_wheels_on
    else:
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    if sched is None or act is None:
        return None
    return max(0.0, (act - sched) / 60.0)


@dataclass
class MinuteState:
    """Airport state for one minute; the per-airport dicts are keyed by code."""

    minute: int
    inbound: dict
    outbound: dict
    landings: dict        # airport -> list of weight-class strings
    takeoffs: dict
    taxi_in: int
    taxi_out: int
    out_delays: list      # delay minutes of aircraft currently taxiing out
    in_delays: list
    weather: Optional[WeatherRecord]


def _cs(arr: np.ndarray) -> np.ndarray:
    out = np.zeros(arr.shape[0] + 1, dtype=np.int64 if arr.dtype.kind == "i" else np.float64)
    np.cumsum(arr, out=out[1:])
    return out


class Timeline:
    """Immutable per-minute state arrays over a synchronized dataset."""

    def __init__(self, dataset: SynchronizedDataset, cfg: FeatureConfig):
        self.start = dataset.minute_start
        self.end = dataset.minute_end
        self.clock = dataset.clock
        self.cfg = cfg
        self.complete = dataset.complete.copy()
        n = self.end - self.start + 1
        self.n_minutes = n

        # airborne membership per airport from track points
        self.inbound = np.zeros((3, n), dtype=np.int64)
        self.outbound = np.zeros((3, n), dtype=np.int64)
        ap_index = {code: i for i, code in enumerate(AIRPORTS)}
        for tr in dataset.tracks:
            minutes = np.unique((tr.t // 60).astype(np.int64))
            minutes = minutes[(minutes >= self.start) & (minutes <= self.end)]
            idx = minutes - self.start
            if tr.destination in ap_index:
                self.inbound[ap_index[tr.destination]][idx] += 1
            if tr.origin in ap_index:
                self.outbound[ap_index[tr.origin]][idx] += 1

        # movement events and SFO ground state from flight records
        land_ev = [[] for _ in AIRPORTS]   # (minute, class index)
        toff_ev = [[] for _ in AIRPORTS]
        self.taxi_in = np.zeros(n, dtype=np.int64)
        self.taxi_out = np.zeros(n, dtype=np.int64)
        self._out_delay_intervals = []
        self._in_delay_intervals = []
        out_total_d = np.zeros(n + 1)
        in_total_d = np.zeros(n + 1)
        out_n_d = np.zeros(n + 1, dtype=np.int64)
        in_n_d = np.zeros(n + 1, dtype=np.int64)
        out_gt_d = np.zeros((len(DELAY_THRESHOLDS), n + 1), dtype=np.int64)
        in_gt_d = np.zeros((len(DELAY_THRESHOLDS), n + 1), dtype=np.int64)
        taxi_in_d = np.zeros(n + 1, dtype=np.int64)
        taxi_out_d = np.zeros(n + 1, dtype=np.int64)
        cls_index = {c: i for i, c in enumerate(WEIGHT_CLASSES)}

        def clip_interval(a: int, b: int):
            a = max(a, self.start) - self.start
            b = min(b, self.end + 1) - self.start
            return (a, b) if a < b else None

        for rec in dataset.flights:
            if rec.airport not in ap_index:
                continue
            a = ap_index[rec.airport]
            cls = cls_index[weight_class(rec.flight_id, cfg)]
            if rec.act_wheels_on is not None:
                m = int(rec.act_wheels_on // 60)
                if self.start <= m <= self.end:
                    land_ev[a].append((m, cls))
            if rec.act_wheels_off is not None:
                m = int(rec.act_wheels_off // 60)
                if self.start <= m <= self.end:
                    toff_ev[a].append((m, cls))
            if rec.airport != "SFO":
                continue
            if rec.act_wheels_on is not None:
                on_min = int(rec.act_wheels_on // 60)
                iv = clip_interval(on_min, on_min + cfg.taxi_in_minutes)
                if iv:
                    taxi_in_d[iv[0]] += 1
                    taxi_in_d[iv[1]] -= 1
                    d = delay_minutes(rec, "in")
                    if d is not None:
                        self._in_delay_intervals.append((iv[0], iv[1], d))
                        in_total_d[iv[0]] += d
                        in_total_d[iv[1]] -= d
                        in_n_d[iv[0]] += 1
                        in_n_d[iv[1]] -= 1
                        for k, thr in enumerate(DELAY_THRESHOLDS):
                            if d > thr:
                                in_gt_d[k][iv[0]] += 1
                                in_gt_d[k][iv[1]] -= 1
            if rec.act_gate_out is not None and rec.act_wheels_off is not None:
                iv = clip_interval(int(rec.act_gate_out // 60),
                                   int(rec.act_wheels_off // 60))
                if iv:
                    taxi_out_d[iv[0]] += 1
                    taxi_out_d[iv[1]] -= 1
                    d = delay_minutes(rec, "out")
                    if d is not None:
                        self._out_delay_intervals.append((iv[0], iv[1], d))
                        out_total_d[iv[0]] += d
                        out_total_d[iv[1]] -= d
                        out_n_d[iv[0]] += 1
                        out_n_d[iv[1]] -= 1
                        for k, thr in enumerate(DELAY_THRESHOLDS):
                            if d > thr:
                                out_gt_d[k][iv[0]] += 1
                                out_gt_d[k][iv[1]] -= 1

        np.cumsum(taxi_in_d[:n], out=self.taxi_in)
        np.cumsum(taxi_out_d[:n], out=self.taxi_out)
        self.out_delay_total = np.cumsum(out_total_d[:n])
        self.in_delay_total = np.cumsum(in_total_d[:n])
        self.out_delay_n = np.cumsum(out_n_d[:n])
        self.in_delay_n = np.cumsum(in_n_d[:n])
        self.out_delay_gt = np.cumsum(out_gt_d[:, :n], axis=1)
        self.in_delay_gt = np.cumsum(in_gt_d[:, :n], axis=1)

        self.land_minutes = []
        self.land_classes = []
        self.toff_minutes = []
        self.toff_classes = []
        self.land_count = np.zeros((3, n), dtype=np.int64)
        self.toff_count = np.zeros((3, n), dtype=np.int64)
        for a in range(3):
            for evs, mins_out, cls_out, counts in (
                    (land_ev[a], self.land_minutes, self.land_classes, self.land_count),
                    (toff_ev[a], self.toff_minutes, self.toff_classes, self.toff_count)):
                mm = np.array([e[0] for e in evs], dtype=np.int64)
                cc = np.array([e[1] for e in evs], dtype=np.int64)
                order = np.argsort(mm, kind="stable")
                mins_out.append(mm[order])
                cls_out.append(cc[order])
                counts[a] = np.bincount(mm - self.start, minlength=n)

        sfo = 0
        self.sfo_land_cls = np.zeros((3, n), dtype=np.int64)
        self.sfo_toff_cls = np.zeros((3, n), dtype=np.int64)
        for c in range(3):
            sel = self.land_classes[sfo] == c
            self.sfo_land_cls[c] = np.bincount(
                self.land_minutes[sfo][sel] - self.start, minlength=n)
            sel = self.toff_classes[sfo] == c
            self.sfo_toff_cls[c] = np.bincount(
                self.toff_minutes[sfo][sel] - self.start, minlength=n)

        # weather channels; NaN at incomplete minutes
        self.vmc = np.full(n, np.nan)
        self.ceiling = np.full(n, np.nan)
        self.visibility = np.full(n, np.nan)
        self.temperature = np.full(n, np.nan)
        self.wind_angle = np.full(n, np.nan)
        self.wind_speed = np.full(n, np.nan)
        self.arr_rwys = np.full(n, np.nan)
        self.dep_rwys = np.full(n, np.nan)
        self.config_ids = [None] * n
        self._weather_records = dataset.weather_by_minute
        for m, w in dataset.weather_by_minute.items():
            i = m - self.start
            self.vmc[i] = 1.0 if w.vmc else 0.0
            self.ceiling[i] = w.ceiling
            self.visibility[i] = w.visibility
            self.temperature[i] = w.temperature if w.temperature is not None else np.nan
            self.wind_angle[i] = w.wind_angle
            self.wind_speed[i] = w.wind_speed
            self.arr_rwys[i] = w.arr_runways
            self.dep_rwys[i] = w.dep_runways
            self.config_ids[i] = w.config_id

        # prefix sums for the windowed statistics
        self._inbound_cs = [_cs(self.inbound[a]) for a in range(3)]
        self._outbound_cs = [_cs(self.outbound[a]) for a in range(3)]
        self._land_cnt_cs = [_cs(self.land_count[a]) for a in range(3)]
        self._toff_cnt_cs = [_cs(self.toff_count[a]) for a in range(3)]
        self._sfo_land_cls_cs = [_cs(self.sfo_land_cls[c]) for c in range(3)]
        self._sfo_toff_cls_cs = [_cs(self.sfo_toff_cls[c]) for c in range(3)]
        self._taxi_in_cs = _cs(self.taxi_in)
        self._taxi_out_cs = _cs(self.taxi_out)
        self._complete_cs = _cs(self.complete.astype(np.int64))

    def in_range(self, minute: int) -> bool:
        return self.start <= minute <= self.end

    def feature_ready(self, minute: int) -> bool:
        """True when the minute and its full look-back are usable."""
        if minute - LOOKBACK_MIN < self.start or minute > self.end:
            return False
        i = minute - self.start
        span = LOOKBACK_MIN + 1
        return self._complete_cs[i + 1] - self._complete_cs[i + 1 - span] == span

    def ready_minutes(self) -> np.ndarray:
        """All minutes for which a feature vector can be computed."""
        span = LOOKBACK_MIN + 1
        if self.n_minutes < span:
            return np.array([], dtype=np.int64)
        idx = np.arange(LOOKBACK_MIN, self.n_minutes)
        ok = (self._complete_cs[idx + 1] - self._complete_cs[idx + 1 - span]) == span
        return idx[ok] + self.start

    def local_time_of_day(self, minute: int) -> int:
        return self.clock.local_minute_of_day(minute)

    def minute_state(self, minute: int) -> MinuteState:
        """Materialize the MinuteState view for one minute."""
        if not self.in_range(minute):
            raise ValueError(f"minute {minute} outside timeline range")
        i = minute - self.start
        landings = {}
        takeoffs = {}
        for a, code in enumerate(AIRPORTS):
            for mins, clss, out in ((self.land_minutes[a], self.land_classes[a], landings),
                                    (self.toff_minutes[a], self.toff_classes[a], takeoffs)):
                lo = np.searchsorted(mins, minute, side="left")
                hi = np.searchsorted(mins, minute, side="right")
                out[code] = [WEIGHT_CLASSES[c] for c in clss[lo:hi]]
        return MinuteState(
            minute=minute,
            inbound={code: int(self.inbound[a][i]) for a, code in enumerate(AIRPORTS)},
            outbound={code: int(self.outbound[a][i]) for a, code in enumerate(AIRPORTS)},
            landings=landings, takeoffs=takeoffs,
            taxi_in=int(self.taxi_in[i]), taxi_out=int(self.taxi_out[i]),
            out_delays=[d for (a, b, d) in self._out_delay_intervals if a <= i < b],
            in_delays=[d for (a, b, d) in self._in_delay_intervals if a <= i < b],
            weather=self._weather_records.get(minute),
        )


def build_timeline(dataset: SynchronizedDataset,
                   cfg: FeatureConfig = FeatureConfig()) -> Timeline:
    """One MinuteState worth of arrays per usable minute."""
    return Timeline(dataset, cfg)


def _elapsed(event_minutes: np.ndarray, minute: int, k: int, cap: float) -> float:
    """Minutes since the k-th most recent event strictly before `minute`."""
    pos = np.searchsorted(event_minutes, minute, side="left")
    if pos < k:
        return cap
    return min(float(minute - event_minutes[pos - k]), cap)


def compute_feature_vector(tl: Timeline, minute: int) -> FeatureVector:
    """The 135 values of the field list for one minute.

    Requires the minute and its 15-minute look-back to be inside the
    timeline and complete.
    """
    if minute - LOOKBACK_MIN < tl.start or minute > tl.end:
        raise ValueError(f"insufficient history: minute {minute} needs "
                         f"[{minute - LOOKBACK_MIN}, {minute}] inside "
                         f"[{tl.start}, {tl.end}]")
    if not tl.feature_ready(minute):
        raise ValueError(f"insufficient history: look-back of minute {minute} "
                         "has incomplete minutes")
    i = minute - tl.start
    cap = tl.cfg.elapsed_cap_min
    v = np.empty(135)
    v[0] = tl.local_time_of_day(minute)
    k = 1
    for a in range(3):
        for arr, cs in ((tl.inbound[a], tl._inbound_cs[a]),
                        (tl.outbound[a], tl._outbound_cs[a])):
            v[k] = arr[i]
            k += 1
            for w in WINDOWS:
                v[k] = (cs[i + 1] - cs[i + 1 - w]) / w
                k += 1
            for w in WINDOWS:
                v[k] = arr[i] - arr[i - w]
                k += 1
    for a in range(3):
        for cnt_cs, ev_minutes in ((tl._land_cnt_cs[a], tl.land_minutes[a]),
                                   (tl._toff_cnt_cs[a], tl.toff_minutes[a])):
            for w in WINDOWS:
                v[k] = (cnt_cs[i + 1] - cnt_cs[i + 1 - w]) / w
                k += 1
            for kk in ELAPSED_COUNTS:
                v[k] = _elapsed(ev_minutes, minute, kk, cap)
                k += 1
    for cls_cs in (tl._sfo_land_cls_cs, tl._sfo_toff_cls_cs):
        for c in range(3):
            for w in WINDOWS:
                v[k] = cls_cs[c][i + 1] - cls_cs[c][i + 1 - w]
                k += 1
    for arr, cs in ((tl.taxi_in, tl._taxi_in_cs), (tl.taxi_out, tl._taxi_out_cs)):
        v[k] = arr[i]
        k += 1
        for w in WINDOWS:
            v[k] = (cs[i + 1] - cs[i + 1 - w]) / w
            k += 1
        for w in WINDOWS:
            v[k] = arr[i] - arr[i - w]
            k += 1
    for total, n_known, gt in ((tl.out_delay_total, tl.out_delay_n, tl.out_delay_gt),
                               (tl.in_delay_total, tl.in_delay_n, tl.in_delay_gt)):
        v[k] = total[i]
        k += 1
        for j in range(len(DELAY_THRESHOLDS)):
            v[k] = gt[j][i]
            k += 1
        v[k] = total[i] / n_known[i] if n_known[i] > 0 else 0.0
        k += 1
    v[k] = tl.vmc[i]
    v[k + 1] = tl.ceiling[i]
    v[k + 2] = tl.visibility[i]
    v[k + 3] = tl.temperature[i]
    v[k + 4] = tl.wind_angle[i]
    v[k + 5] = tl.wind_speed[i]
    hw, cw = wind_components(float(tl.wind_angle[i]), float(tl.wind_speed[i]),
                             tl.cfg.runway_heading_deg)
    v[k + 6] = hw
    v[k + 7] = cw
    v[k + 8] = tl.arr_rwys[i]
    v[k + 9] = tl.dep_rwys[i]
    k += 10
    if k != 135:
        raise AssertionError(f"feature writer produced {k} values")
    return FeatureVector(minute=minute, values=v)

"""Domain types shared across the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

AIRPORTS = ("SFO", "OAK", "SJC")
WEIGHT_CLASSES = ("small", "large", "heavy")


class IngestError(ValueError):
    """Raised when an input file cannot be accepted."""


class TrackPoint(NamedTuple):
    t: float        # seconds since epoch, UTC
    x: float        # NM east of the radar site
    y: float        # NM north of the radar site
    alt: float      # feet MSL


@dataclass(frozen=True)
class RadarTrack:
    """Time-ordered trajectory of one flight inside radar range.

    Points are stored as parallel numpy arrays; ``point(i)`` and
    ``points()`` give a tuple view when object access is convenient.
    """

    flight_id: str
    origin: str
    destination: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    alt: np.ndarray

    def __len__(self) -> int:
        return self.t.shape[0]

    def point(self, i: int) -> TrackPoint:
        return TrackPoint(float(self.t[i]), float(self.x[i]),
                          float(self.y[i]), float(self.alt[i]))

    def points(self) -> list[TrackPoint]:
        return [self.point(i) for i in range(len(self))]

    def validate(self, radius_nm: float = 45.0) -> None:
        """Check the track invariants, raising ValueError on violation."""
        if len(self) < 2:
            raise ValueError(f"track {self.flight_id}: fewer than 2 points")
        if not np.all(np.diff(self.t) > 0):
            raise ValueError(f"track {self.flight_id}: timestamps not strictly increasing")
        if np.any(self.alt < 0):
            raise ValueError(f"track {self.flight_id}: negative altitude")
        rng = np.hypot(self.x, self.y)
        if np.any(rng > radius_nm + 1e-9):
            raise ValueError(f"track {self.flight_id}: point outside {radius_nm} NM")


@dataclass(frozen=True)
class FlightRecord:
    """Scheduled/actual movement times for one flight at one airport.

    All times are seconds since epoch; None marks a missing value.
    """

    flight_id: str
    airport: str
    sched_gate_out: Optional[float] = None
    act_gate_out: Optional[float] = None
    act_wheels_off: Optional[float] = None
    act_wheels_on: Optional[float] = None
    sched_wheels_on: Optional[float] = None


@dataclass
class WeatherRecord:
    """Per-minute weather and runway-configuration state."""

    minute: int
    vmc: bool
    ceiling: float          # feet, clipped to 10,000
    visibility: float       # NM, clipped to 10
    temperature: Optional[float]
    wind_angle: float       # degrees true, [0, 360)
    wind_speed: float       # knots
    arr_runways: int
    dep_runways: int
    config_id: str


@dataclass(frozen=True)
class GaEvent:
    """One detected go-around in a track."""

    flight_id: str
    t_ga: float
    point_index: int
    descent_start_index: int
    climb_end_index: int


@dataclass(frozen=True)
class FeatureVector:
    """The 135 ordered per-minute airport-state values."""

    minute: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (135,):
            raise ValueError(f"expected 135 values, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature vector contains non-finite values")


@dataclass(frozen=True)
class Sample:
    """A labeled per-minute snapshot: 0 = nominal, 1 = go-around."""

    features: FeatureVector
    label: int
    minute: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")

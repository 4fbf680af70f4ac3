"""Go-around detection and trajectory segmentation.

A go-around is a climb of at least ``climb_run`` consecutive altitude
steps immediately after a descent of at least ``descent_run`` consecutive
steps, with the turning point inside the terminal flight phase. The event
timestamp is the turning-point sample, where the climb is initiated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .types import GaEvent, RadarTrack


@dataclass(frozen=True)
class DetectorConfig:
    descent_run: int = 10
    climb_run: int = 15
    terminal_range_nm: float = 45.0
    terminal_alt_ft: float = 10_000.0
    monotone_mode: str = "strict"   # "strict" | "non-strict"

    def __post_init__(self):
        if self.descent_run < 2 or self.climb_run < 2:
            raise ValueError("descent_run and climb_run must be >= 2")
        if self.monotone_mode not in ("strict", "non-strict"):
            raise ValueError(f"unknown monotone_mode {self.monotone_mode!r}")


def _terminal_mask(track: RadarTrack, cfg: DetectorConfig) -> np.ndarray:
    rng = np.hypot(track.x, track.y)
    mask = (rng <= cfg.terminal_range_nm) & (track.alt <= cfg.terminal_alt_ft)
    return np.ascontiguousarray(mask, dtype=np.uint8)


def merge_candidates(candidates: Iterable[int], climb_run: int) -> list:
    """Drop candidates sharing a climb sample with an earlier kept one.

    Candidate i's climb covers samples [i, i + climb_run]; two candidates
    overlap when the later one starts inside that span.
    """
    kept = []
    for i in candidates:
        if kept and i <= kept[-1] + climb_run:
            continue
        kept.append(i)
    return kept


def detect_ga(track: RadarTrack, cfg: DetectorConfig = DetectorConfig()) -> list:
    """Detect go-around events in one track. Too-short tracks yield []."""
    alt = np.ascontiguousarray(track.alt, dtype=np.float64)
    term = _terminal_mask(track, cfg)
    candidates = kernels.scan_candidates(
        alt, term, cfg.descent_run, cfg.climb_run, cfg.monotone_mode == "strict")
    events = []
    for i in merge_candidates(candidates, cfg.climb_run):
        events.append(GaEvent(
            flight_id=track.flight_id,
            t_ga=float(track.t[i]),
            point_index=i,
            descent_start_index=i - cfg.descent_run,
            climb_end_index=i + cfg.climb_run,
        ))
    return events


def detect_all(tracks: Iterable[RadarTrack],
               cfg: DetectorConfig = DetectorConfig()) -> list:
    """Run detect_ga over a track collection, concatenating the events."""
    events = []
    for track in tracks:
        events.extend(detect_ga(track, cfg))
    return events


@dataclass(frozen=True)
class TrackSegments:
    """Half-open index ranges partitioning a track around one event."""

    pre: tuple
    final_descent: tuple
    climb: tuple
    remainder: tuple

    def as_tuple(self):
        return (self.pre, self.final_descent, self.climb, self.remainder)


def segment(track: RadarTrack, event: GaEvent) -> TrackSegments:
    """Split a track into pre-GA, final descent, climb and remainder."""
    n = len(track)
    ds, pi, ce = event.descent_start_index, event.point_index, event.climb_end_index
    if not (0 <= ds < pi <= ce < n):
        raise ValueError(
            f"event indices ({ds}, {pi}, {ce}) out of range for a {n}-point track")
    return TrackSegments(
        pre=(0, ds),
        final_descent=(ds, pi),
        climb=(pi, ce + 1),
        remainder=(ce + 1, n),
    )


def quarterly_counts(events: Iterable[GaEvent], utc_offset_min: int = 0) -> dict:
    """Histogram of events keyed by (year, quarter) in local time."""
    counts: dict = {}
    for ev in events:
        tm = time.gmtime(ev.t_ga + utc_offset_min * 60)
        key = (tm.tm_year, (tm.tm_mon - 1) // 3 + 1)
        counts[key] = counts.get(key, 0) + 1
    return counts

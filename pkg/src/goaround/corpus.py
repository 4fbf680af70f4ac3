"""Labeled sample sets: GA labeling, nominal sampling and period splits.

A minute is eligible when a feature vector can be computed for it, its
local time of day falls inside the study window, and (when configured)
the runway configuration matches. Nominal minutes must additionally sit
more than ``nominal_gap_min`` minutes from every detected go-around,
before or after.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .features import Timeline, compute_feature_vector
from .types import GaEvent, Sample


@dataclass(frozen=True)
class CorpusConfig:
    day_start_min: int = 7 * 60       # 07:00 local
    day_end_min: int = 23 * 60        # 23:00 local
    nominal_gap_min: int = 15
    nominal_per_ga: float = 1.0
    seed: int = 0
    config_filter: Optional[str] = None

    def __post_init__(self):
        if not self.day_start_min < self.day_end_min:
            raise ValueError("day_start_min must be before day_end_min")
        if self.nominal_gap_min < 0:
            raise ValueError("nominal_gap_min must be >= 0")


def ga_minutes(events: Iterable[GaEvent]) -> np.ndarray:
    """Sorted unique minutes containing a detected go-around."""
    return np.unique(np.array([int(ev.t_ga // 60) for ev in events], dtype=np.int64))


def _passes_filters(tl: Timeline, minute: int, cfg: CorpusConfig) -> bool:
    if not tl.feature_ready(minute):
        return False
    tod = tl.local_time_of_day(minute)
    if not cfg.day_start_min <= tod < cfg.day_end_min:
        return False
    if cfg.config_filter is not None:
        if tl.config_ids[minute - tl.start] != cfg.config_filter:
            return False
    return True


def min_distance_to_events(minutes: np.ndarray, event_minutes: np.ndarray) -> np.ndarray:
    """Per minute, the distance in minutes to the nearest event minute."""
    if event_minutes.size == 0:
        return np.full(minutes.shape, np.iinfo(np.int64).max, dtype=np.int64)
    pos = np.searchsorted(event_minutes, minutes)
    left = np.where(pos > 0, minutes - event_minutes[np.maximum(pos - 1, 0)],
                    np.iinfo(np.int64).max)
    right = np.where(pos < event_minutes.size,
                     event_minutes[np.minimum(pos, event_minutes.size - 1)] - minutes,
                     np.iinfo(np.int64).max)
    return np.minimum(np.abs(left), np.abs(right))


def eligible_nominal_minutes(tl: Timeline, events: Sequence[GaEvent],
                             cfg: CorpusConfig) -> np.ndarray:
    """Minutes passing all filters and the gap rule around every GA."""
    ready = tl.ready_minutes()
    if ready.size == 0:
        return ready
    tod = (ready + tl.clock.utc_offset_min) % 1440
    ok = (tod >= cfg.day_start_min) & (tod < cfg.day_end_min)
    if cfg.config_filter is not None:
        cids = np.array([tl.config_ids[m - tl.start] for m in ready], dtype=object)
        ok &= cids == cfg.config_filter
    candidates = ready[ok]
    if candidates.size == 0:
        return candidates
    dist = min_distance_to_events(candidates, ga_minutes(events))
    return candidates[dist > cfg.nominal_gap_min]


def label_ga_samples(tl: Timeline, events: Sequence[GaEvent],
                     cfg: CorpusConfig = CorpusConfig()) -> tuple:
    """GA samples (label 1), one per distinct eligible minute.

    Returns (samples, excluded_count); excluded_count is the number of
    distinct GA minutes rejected by the time-of-day, configuration or
    completeness filters.
    """
    samples = []
    excluded = 0
    for m in ga_minutes(events):
        m = int(m)
        if not _passes_filters(tl, m, cfg):
            excluded += 1
            continue
        samples.append(Sample(features=compute_feature_vector(tl, m),
                              label=1, minute=m))
    return samples, excluded


def sample_nominal(tl: Timeline, events: Sequence[GaEvent], n: int,
                   cfg: CorpusConfig = CorpusConfig(),
                   seed: Optional[int] = None) -> list:
    """n distinct nominal minutes (label 0), uniform without replacement."""
    if n < 0:
        raise ValueError("n must be >= 0")
    eligible = eligible_nominal_minutes(tl, events, cfg)
    if n > eligible.size:
        raise ValueError(f"requested {n} nominal samples but only "
                         f"{eligible.size} eligible minutes")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    chosen = np.sort(rng.choice(eligible, size=n, replace=False))
    return [Sample(features=compute_feature_vector(tl, int(m)), label=0, minute=int(m))
            for m in chosen]


def split_by_period(samples: Sequence[Sample], train_range: tuple,
                    test_range: tuple, cfg: CorpusConfig = CorpusConfig()) -> tuple:
    """Partition samples into a balanced train set and an untouched test set.

    Ranges are half-open [start, end) minute intervals and must not
    overlap. Training keeps every GA sample in its range plus
    round(nominal_per_ga * n_ga) seeded-subsampled nominals; the test set
    keeps everything in its range.
    """
    t0, t1 = train_range
    s0, s1 = test_range
    if max(t0, s0) < min(t1, s1):
        raise ValueError("train and test ranges overlap")
    train_ga = [s for s in samples if s.label == 1 and t0 <= s.minute < t1]
    train_nom = [s for s in samples if s.label == 0 and t0 <= s.minute < t1]
    test = [s for s in samples if s0 <= s.minute < s1]
    if not train_ga:
        raise ValueError("no GA samples in the training range")
    want = int(round(cfg.nominal_per_ga * len(train_ga)))
    if want > len(train_nom):
        raise ValueError(f"training needs {want} nominal samples but the "
                         f"training range only has {len(train_nom)}")
    rng = np.random.default_rng(cfg.seed + 1)
    keep = np.sort(rng.choice(len(train_nom), size=want, replace=False))
    train = train_ga + [train_nom[i] for i in keep]
    train.sort(key=lambda s: (s.minute, s.label))
    return train, test

"""Evaluation reports: lift curves, alert timing and feature distributions.

Two lift readings are published for every sweep point: ``lift_ratio``
compares the GA rate inside the alert set against the rate outside it,
and ``simple_ratio`` is capture divided by alert fraction. Both appear in
the reports because the two definitions disagree away from the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .discriminant import SweepPoint
from .features import CATALOG
from .types import Sample


class LiftPoint(NamedTuple):
    threshold: float
    alert_fraction: float
    capture_fraction: float
    lift_ratio: float
    simple_ratio: float


def lift_ratio(alert_fraction: float, capture_fraction: float) -> float:
    """GA rate in the alert set over the GA rate outside it.

    Conventions: +inf at alert_fraction 0 or full capture below full
    alert; exactly 1 at alert_fraction 1.
    """
    f, g = alert_fraction, capture_fraction
    if f <= 0.0:
        return np.inf
    if f >= 1.0:
        return 1.0
    if g >= 1.0:
        return np.inf
    return (g / f) / ((1.0 - g) / (1.0 - f))


def simple_lift(alert_fraction: float, capture_fraction: float) -> float:
    if alert_fraction <= 0.0:
        return np.inf
    return capture_fraction / alert_fraction


def lift_curve(sweep_output: Sequence[SweepPoint]) -> list:
    """Attach both lift readings to every sweep point."""
    return [LiftPoint(p.threshold, p.alert_fraction, p.capture_fraction,
                      lift_ratio(p.alert_fraction, p.capture_fraction),
                      simple_lift(p.alert_fraction, p.capture_fraction))
            for p in sweep_output]


def capture_at(curve: Sequence, target_alert_fraction: float) -> tuple:
    """(threshold, capture) at a target alert fraction.

    The threshold comes from the point with the largest alert fraction
    not exceeding the target; capture interpolates linearly toward the
    next point.
    """
    if not 0.0 <= target_alert_fraction <= 1.0:
        raise ValueError("target alert fraction must be in [0, 1]")
    if not curve:
        raise ValueError("empty curve")
    lo = None
    hi = None
    for p in curve:
        if p.alert_fraction <= target_alert_fraction:
            if lo is None or p.alert_fraction >= lo.alert_fraction:
                lo = p
        elif hi is None or p.alert_fraction < hi.alert_fraction:
            hi = p
    if lo is None:
        raise ValueError("curve has no point at or below the target")
    g = lo.capture_fraction
    if hi is not None and hi.alert_fraction > lo.alert_fraction:
        frac = (target_alert_fraction - lo.alert_fraction) / \
               (hi.alert_fraction - lo.alert_fraction)
        g = lo.capture_fraction + frac * (hi.capture_fraction - lo.capture_fraction)
    return lo.threshold, g


@dataclass(frozen=True)
class TimeOfDayReport:
    bin_start_min: np.ndarray
    nominal: np.ndarray
    ga: np.ndarray
    alert: np.ndarray


def time_of_day_report(samples: Sequence[Sample], predictions: Sequence[int],
                       bin_minutes: int, day_start_min: int = 7 * 60,
                       day_end_min: int = 23 * 60) -> TimeOfDayReport:
    """Sample counts per local time-of-day bin for nominal, GA and alert.

    Time of day is read from feature 1; predictions align with samples
    and mark the alert set.
    """
    if len(predictions) != len(samples):
        raise ValueError("predictions must align with samples")
    span = day_end_min - day_start_min
    if bin_minutes <= 0 or span % bin_minutes != 0:
        raise ValueError(f"bin_minutes must divide the {span}-minute day window")
    n_bins = span // bin_minutes
    edges = day_start_min + bin_minutes * np.arange(n_bins)
    nominal = np.zeros(n_bins, dtype=np.int64)
    ga = np.zeros(n_bins, dtype=np.int64)
    alert = np.zeros(n_bins, dtype=np.int64)
    for s, pred in zip(samples, predictions):
        tod = s.features.values[0]
        if not day_start_min <= tod < day_end_min:
            continue
        b = int((tod - day_start_min) // bin_minutes)
        if s.label == 1:
            ga[b] += 1
        else:
            nominal[b] += 1
        if pred == 1:
            alert[b] += 1
    return TimeOfDayReport(bin_start_min=edges, nominal=nominal, ga=ga, alert=alert)


@dataclass(frozen=True)
class HistogramPair:
    feature_index: int
    bin_edges: np.ndarray
    nominal_density: np.ndarray
    ga_density: np.ndarray
    divergence: float        # total-variation distance


def _bin_edges(values: np.ndarray, bins: int) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        return np.array([lo, hi])
    integral = np.all(values == np.round(values))
    if integral and hi - lo <= 60:
        return np.arange(lo - 0.5, hi + 1.0, 1.0)
    return np.linspace(lo, hi, bins + 1)


def _report_from_columns(feature_index: int, nom: np.ndarray, ga: np.ndarray,
                         bins: int) -> HistogramPair:
    if nom.size == 0 or ga.size == 0:
        raise ValueError("distribution report needs samples from both classes")
    edges = _bin_edges(np.concatenate([nom, ga]), bins)
    if edges.size == 2 and edges[0] == edges[1]:
        return HistogramPair(feature_index, edges, np.array([1.0]),
                             np.array([1.0]), 0.0)
    nom_counts, _ = np.histogram(nom, bins=edges)
    ga_counts, _ = np.histogram(ga, bins=edges)
    p = nom_counts / nom_counts.sum()
    q = ga_counts / ga_counts.sum()
    tv = 0.5 * float(np.abs(p - q).sum())
    return HistogramPair(feature_index, edges, p, q, tv)


def distribution_report(samples: Sequence[Sample], feature_index: int,
                        bins: int = 50) -> HistogramPair:
    """Per-class histograms of one feature over shared bin edges.

    Integer-valued features with a span of at most 60 get unit-width
    bins. Densities are per-bin probability masses; the divergence is
    the total-variation distance between the two histograms.
    """
    if not 1 <= feature_index <= 135:
        raise ValueError(f"feature index {feature_index} outside 1..135")
    col = feature_index - 1
    values = np.array([s.features.values[col] for s in samples])
    labels = np.array([s.label for s in samples])
    return _report_from_columns(feature_index, values[labels == 0],
                                values[labels == 1], bins)


def feature_divergences(samples: Sequence[Sample], bins: int = 50) -> np.ndarray:
    """Total-variation divergence of every catalog feature, index order."""
    x = np.array([s.features.values for s in samples])
    labels = np.array([s.label for s in samples])
    nom = x[labels == 0]
    ga = x[labels == 1]
    return np.array([
        _report_from_columns(f.index, nom[:, f.index - 1], ga[:, f.index - 1],
                             bins).divergence
        for f in CATALOG])


def rank_features(samples: Sequence[Sample], bins: int = 50) -> list:
    """Catalog indices sorted by divergence descending (stable)."""
    divs = feature_divergences(samples, bins)
    order = np.argsort(-divs, kind="stable")
    return [int(i) + 1 for i in order]

"""Two-class Gaussian discriminant: fit, score, classify, threshold sweep.

The score of a standardized vector x is

    (x - mu0)' P0 (x - mu0) + ln|S0| - (x - mu1)' P1 (x - mu1) - ln|S1|

with class 0 = nominal and class 1 = go-around; larger scores are more
GA-like, and a vector is labeled 0 exactly when its score is below the
threshold T. Class covariances are kept separate, so the boundary is
quadratic. A ridge term lambda * (trace(S)/d) * I keeps the 135x135
covariances invertible on small GA corpora.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .types import Sample

DEFAULT_RIDGE = 1e-4


@dataclass(frozen=True)
class Standardizer:
    """Per-feature shift and scale applied before any class math."""

    shift: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if np.any(self.scale <= 0):
            raise ValueError("standardizer scales must be positive")

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.shift) / self.scale

    @classmethod
    def from_data(cls, x: np.ndarray) -> "Standardizer":
        shift = x.mean(axis=0)
        scale = x.std(axis=0)
        scale = np.where(scale == 0, 1.0, scale)
        return cls(shift=shift, scale=scale)

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(shift=np.zeros(dim), scale=np.ones(dim))


@dataclass(frozen=True)
class ClassModel:
    mean: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray
    log_det: float


@dataclass(frozen=True)
class DiscriminantModel:
    class0: ClassModel
    class1: ClassModel
    standardizer: Standardizer
    ridge_lambda: float

    @property
    def dim(self) -> int:
        return self.class0.mean.shape[0]


def _fit_class(x: np.ndarray, ridge_lambda: float) -> ClassModel:
    if x.shape[0] < 2:
        raise ValueError(f"class needs at least 2 samples, got {x.shape[0]}")
    mean = x.mean(axis=0)
    cov = np.cov(x, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    d = cov.shape[0]
    cov = cov + ridge_lambda * (np.trace(cov) / d) * np.eye(d)
    try:
        chol = scipy.linalg.cho_factor(cov, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError(
            "covariance factorization failed; increase ridge_lambda") from exc
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
    precision = scipy.linalg.cho_solve(chol, np.eye(d))
    precision = (precision + precision.T) / 2.0
    return ClassModel(mean=mean, covariance=cov, precision=precision,
                      log_det=log_det)


def fit(train: Sequence[Sample], ridge_lambda: float = DEFAULT_RIDGE,
        standardizer: Standardizer = None) -> DiscriminantModel:
    """Fit per-class Gaussians on standardized features.

    The standardizer derives from the pooled training data unless one is
    supplied (scale 1 for constant features). Covariances are unbiased
    (n-1) estimates plus the ridge term.
    """
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be >= 0")
    x = np.array([s.features.values for s in train], dtype=np.float64)
    y = np.array([s.label for s in train], dtype=np.int64)
    for label in (0, 1):
        if (y == label).sum() < 2:
            raise ValueError(f"class {label} has fewer than 2 samples")
    if standardizer is None:
        standardizer = Standardizer.from_data(x)
    xs = standardizer.transform(x)
    return DiscriminantModel(
        class0=_fit_class(xs[y == 0], ridge_lambda),
        class1=_fit_class(xs[y == 1], ridge_lambda),
        standardizer=standardizer,
        ridge_lambda=ridge_lambda,
    )


def score_many(model: DiscriminantModel, x: np.ndarray) -> np.ndarray:
    """Discriminant scores for rows of x (raw, unstandardized features)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite feature values")
    xs = model.standardizer.transform(x)
    z0 = xs - model.class0.mean
    z1 = xs - model.class1.mean
    q0 = np.einsum("ij,jk,ik->i", z0, model.class0.precision, z0)
    q1 = np.einsum("ij,jk,ik->i", z1, model.class1.precision, z1)
    return (q0 + model.class0.log_det) - (q1 + model.class1.log_det)


def score(model: DiscriminantModel, x) -> float:
    """Score one feature vector; larger is more GA-like."""
    values = x.values if hasattr(x, "values") else x
    return float(score_many(model, np.asarray(values, dtype=np.float64)[None, :])[0])


def classify(model: DiscriminantModel, x, threshold: float) -> int:
    """Label 0 when score(x) < threshold, else 1."""
    return 0 if score(model, x) < threshold else 1


class SweepPoint(NamedTuple):
    threshold: float
    alert_fraction: float
    capture_fraction: float


def sweep(model: DiscriminantModel, samples: Sequence[Sample]) -> list:
    """Alert/capture fractions at every distinct score threshold.

    Output is sorted by alert_fraction ascending, bracketed by +inf and
    -inf sentinel thresholds with exact (0, 0) and (1, 1) endpoints.
    """
    labels = np.array([s.label for s in samples], dtype=np.int64)
    x = np.array([s.features.values for s in samples], dtype=np.float64)
    scores = score_many(model, x)
    return sweep_scores(scores, labels)


def sweep_scores(scores: np.ndarray, labels: np.ndarray) -> list:
    """sweep() on precomputed scores; alert means score >= threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n = scores.size
    n_ga = int((labels == 1).sum())
    if n_ga == 0 or n_ga == n:
        raise ValueError("sweep needs samples from both classes")
    sorted_all = np.sort(scores)
    sorted_ga = np.sort(scores[labels == 1])
    uniq = np.unique(scores)[::-1]
    alert = (n - np.searchsorted(sorted_all, uniq, side="left")) / n
    capture = (n_ga - np.searchsorted(sorted_ga, uniq, side="left")) / n_ga
    out = [SweepPoint(np.inf, 0.0, 0.0)]
    out.extend(SweepPoint(float(s), float(f), float(g))
               for s, f, g in zip(uniq, alert, capture))
    out.append(SweepPoint(-np.inf, 1.0, 1.0))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _vec_json(v: np.ndarray) -> str:
    return "[" + ", ".join(_fmt(x) for x in v) + "]"


def _mat_json(m: np.ndarray, indent: str) -> str:
    rows = (",\n" + indent).join(_vec_json(row) for row in m)
    return "[\n" + indent + rows + "\n" + indent[:-2] + "]"


def save_model(model: DiscriminantModel, path) -> None:
    """Persist the model as JSON with 17 significant digits per number."""
    parts = [
        "{",
        f'  "ridge_lambda": {_fmt(model.ridge_lambda)},',
        '  "standardizer": {',
        f'    "shift": {_vec_json(model.standardizer.shift)},',
        f'    "scale": {_vec_json(model.standardizer.scale)}',
        "  },",
    ]
    for name, cm in (("class0", model.class0), ("class1", model.class1)):
        parts.append(f'  "{name}": {{')
        parts.append(f'    "mean": {_vec_json(cm.mean)},')
        parts.append(f'    "cov": {_mat_json(cm.covariance, "      ")},')
        parts.append(f'    "log_det": {_fmt(cm.log_det)}')
        parts.append("  }," if name == "class0" else "  }")
    parts.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def load_model(path) -> DiscriminantModel:
    """Load a persisted model, rebuilding precisions from the covariances."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    classes = []
    for name in ("class0", "class1"):
        cov = np.array(doc[name]["cov"], dtype=np.float64)
        chol = scipy.linalg.cho_factor(cov, lower=True)
        precision = scipy.linalg.cho_solve(chol, np.eye(cov.shape[0]))
        precision = (precision + precision.T) / 2.0
        classes.append(ClassModel(
            mean=np.array(doc[name]["mean"], dtype=np.float64),
            covariance=cov, precision=precision,
            log_det=float(doc[name]["log_det"])))
    return DiscriminantModel(
        class0=classes[0], class1=classes[1],
        standardizer=Standardizer(
            shift=np.array(doc["standardizer"]["shift"], dtype=np.float64),
            scale=np.array(doc["standardizer"]["scale"], dtype=np.float64)),
        ridge_lambda=float(doc["ridge_lambda"]),
    )

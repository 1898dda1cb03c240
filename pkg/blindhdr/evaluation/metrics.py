"""Correlation and error metrics between predicted and subjective scores."""

from __future__ import annotations

import numpy as np
from scipy import stats

MIN_SAMPLES = 3


class MetricError(ValueError):
    """Raised when a metric is undefined for the given vectors."""


def _pair(x, y, minimum: int = MIN_SAMPLES) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise MetricError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < minimum:
        raise MetricError(f"need at least {minimum} samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise MetricError("scores must be finite")
    return x, y


def _require_variation(x: np.ndarray, y: np.ndarray) -> None:
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise MetricError("correlation is undefined for a constant vector")


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation with an arithmetic order that is symmetric in ``x`` and ``y``."""

    a = x - x.mean()
    b = y - y.mean()
    r = np.sum(a * b) / np.sqrt(np.sum(a * a) * np.sum(b * b))
    return float(np.clip(r, -1.0, 1.0))


def srcc(x, y) -> float:
    """Spearman rank correlation; ties take their average rank."""

    x, y = _pair(x, y)
    _require_variation(x, y)
    return _pearson(stats.rankdata(x), stats.rankdata(y))


def krcc(x, y) -> float:
    """Kendall tau-b."""

    x, y = _pair(x, y)
    _require_variation(x, y)
    return float(stats.kendalltau(x, y, variant="b").statistic)


def plcc(x, y) -> float:
    x, y = _pair(x, y)
    _require_variation(x, y)
    return _pearson(x, y)


def rmse(x, y) -> float:
    x, y = _pair(x, y, minimum=1)
    return float(np.sqrt(np.mean((x - y) ** 2)))


def all_metrics(predicted, actual) -> dict[str, float]:
    return {
        "srcc": srcc(predicted, actual),
        "krcc": krcc(predicted, actual),
        "plcc": plcc(predicted, actual),
        "rmse": rmse(predicted, actual),
    }

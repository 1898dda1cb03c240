"""Correlation metrics, content-disjoint splits and the evaluation protocols."""

from .harness import (
    EvaluationError,
    MetricsReport,
    bundle_predictor,
    cross_dataset_eval,
    model_trainer,
    oracle_trainer,
    run_evaluation,
)
from .metrics import MetricError, all_metrics, krcc, plcc, rmse, srcc
from .splits import Split, make_splits

__all__ = [
    "EvaluationError",
    "MetricError",
    "MetricsReport",
    "Split",
    "all_metrics",
    "bundle_predictor",
    "cross_dataset_eval",
    "krcc",
    "make_splits",
    "model_trainer",
    "oracle_trainer",
    "plcc",
    "rmse",
    "run_evaluation",
    "srcc",
]

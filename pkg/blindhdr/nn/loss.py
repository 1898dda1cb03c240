"""L1 training loss and its gradient."""

from __future__ import annotations

import logging

import numpy as np

from .params import ShapeError

logger = logging.getLogger(__name__)


def _pair(pred: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"loss inputs disagree: {pred.shape} vs {target.shape}")
    if pred.size == 0:
        raise ShapeError("loss over an empty batch")
    return pred, target


def l1_loss(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean absolute error."""

    pred, target = _pair(pred, target)
    return float(np.mean(np.abs(pred - target)))


def l1_loss_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Gradient ``sign(pred - target) / n``; zero where the two agree."""

    pred, target = _pair(pred, target)
    return np.sign(pred - target) / pred.size

"""Inference: patch-level noise, resistance and scores, pooled to an image score."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..hdrio import HdrImage, luminance
from ..maps.quality_map import QualityMap
from ..nn import ensure_finite
from ..preprocess import FeatureStack
from .bundle import ModelBundle
from .inputs import prepare_inputs
from .mixing import mix

logger = logging.getLogger(__name__)

DEFAULT_BATCH = 64


@dataclass(frozen=True)
class PatchPrediction:
    """Per-patch noise ``delta_hat``, resistance ``t_resist`` and score ``dmos_patch``."""

    delta_hat: np.ndarray
    t_resist: np.ndarray
    dmos_patch: np.ndarray


class ImagePrediction(NamedTuple):
    score: float
    quality_map: QualityMap
    t_map: QualityMap
    delta_map: QualityMap


def _in_batches(forward, x: np.ndarray, batch_size: int) -> np.ndarray:
    outputs = [forward(x[start : start + batch_size]) for start in range(0, len(x), batch_size)]
    return np.concatenate(outputs)[:, 0]


def enet_forward(
    patches: np.ndarray, bundle: ModelBundle, training: bool = False
) -> np.ndarray:
    """Noise estimates for preprocessed ``(S, S)`` or ``(N, S, S)`` patches."""

    patches = np.asarray(patches, dtype=np.float64)
    if patches.ndim == 2:
        patches = patches[np.newaxis]
    x = patches[:, np.newaxis] / bundle.config.input_peak
    return bundle.enet.forward(x, training=training)[:, 0]


def pnet_forward(
    stack: FeatureStack | np.ndarray, bundle: ModelBundle, training: bool = False
) -> np.ndarray:
    """Error resistance for one feature stack or a ``(N, 3, S, S)`` batch."""

    x = stack.as_array()[np.newaxis] if isinstance(stack, FeatureStack) else np.asarray(stack)
    return bundle.pnet.forward(x, training=training)[:, 0]


def estimate_noise(
    bundle: ModelBundle, enet_inputs: np.ndarray, batch_size: int = DEFAULT_BATCH
) -> np.ndarray:
    return _in_batches(bundle.enet.forward, enet_inputs, batch_size)


def estimate_resistance(
    bundle: ModelBundle, pnet_inputs: np.ndarray, batch_size: int = DEFAULT_BATCH
) -> np.ndarray:
    return _in_batches(bundle.pnet.forward, pnet_inputs, batch_size)


def predict_patches(
    bundle: ModelBundle,
    enet_inputs: np.ndarray,
    pnet_inputs: np.ndarray,
    batch_size: int = DEFAULT_BATCH,
) -> PatchPrediction:
    delta_hat = estimate_noise(bundle, enet_inputs, batch_size)
    t_resist = estimate_resistance(bundle, pnet_inputs, batch_size)
    return PatchPrediction(
        delta_hat=delta_hat,
        t_resist=t_resist,
        dmos_patch=mix(delta_hat, t_resist, float(bundle.kappa.value)),
    )


def predict_image(
    bundle: ModelBundle,
    image: HdrImage,
    stride: int = 32,
    batch_size: int = DEFAULT_BATCH,
) -> ImagePrediction:
    """Score an image as ``D_scale`` times the mean patch score."""

    inputs = prepare_inputs(luminance(image).plane(), bundle.config, stride)
    patches = predict_patches(bundle, inputs.enet, inputs.pnet, batch_size)
    grid = inputs.grid
    rows, cols = grid.grid_dims

    def as_map(values: np.ndarray) -> QualityMap:
        return QualityMap(
            values=values.reshape(rows, cols),
            patch_size=grid.size,
            stride=grid.stride,
            source_dims=grid.source_dims,
        )

    score = bundle.config.d_scale * float(np.mean(patches.dmos_patch))
    ensure_finite("image score", np.array(score))
    logger.debug("Scored %d patches: %.4f", len(grid), score)
    return ImagePrediction(
        score=score,
        quality_map=as_map(patches.dmos_patch),
        t_map=as_map(patches.t_resist),
        delta_map=as_map(patches.delta_hat),
    )

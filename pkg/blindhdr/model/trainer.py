"""Two-stage training.

Stage 1 fits the noise estimator to per-patch mean absolute error. Stage 2 freezes it
and fits the resistance network and the mixing gain to the image's global score,
which every patch of that image inherits as its target.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.optimize import brentq

from ..hdrio import DatasetManifest, ManifestEntry, luminance, read_image
from ..nn import Adam, NumericError, l1_loss, l1_loss_grad, softplus_inverse
from ..preprocess import extract_patches, patch_delta
from ..utility.config import ConfigError
from .bundle import ModelBundle, seeded_rng
from .config import TrainConfig
from .inputs import prepare_inputs
from .mixing import MixingLayer, kappa_for_gain
from .pnet import PNET_EPSILON
from .predict import estimate_noise, estimate_resistance

logger = logging.getLogger(__name__)

HEAD_TARGET_FLOOR = 1e-4
SHUFFLE_STREAM = 1
DROPOUT_STREAM = 2
STAGE2_SHUFFLE_STREAM = 3


class TrainingError(RuntimeError):
    """Raised when a training stage breaks one of its own contracts."""


@dataclass(frozen=True)
class PatchDataset:
    """All training patches of a manifest, in manifest then row-major patch order."""

    enet_inputs: np.ndarray
    pnet_inputs: np.ndarray
    delta_targets: np.ndarray
    dmos_targets: np.ndarray
    image_index: np.ndarray

    def __len__(self) -> int:
        return int(self.delta_targets.shape[0])


def _featurize(entry: ManifestEntry, cfg: TrainConfig) -> tuple[np.ndarray, ...]:
    model = cfg.model
    reference = luminance(read_image(entry.reference_path)).plane()
    distorted = luminance(read_image(entry.distorted_path)).plane()
    delta = patch_delta(
        extract_patches(reference, model.patch_size, cfg.stride),
        extract_patches(distorted, model.patch_size, cfg.stride),
    )
    inputs = prepare_inputs(distorted, model, cfg.stride)
    return (
        inputs.enet,
        inputs.pnet,
        delta / model.l_peak,
        np.full(len(inputs), entry.dmos / model.d_scale),
    )


def build_patch_dataset(manifest: DatasetManifest, cfg: TrainConfig) -> PatchDataset:
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        parts = list(pool.map(lambda entry: _featurize(entry, cfg), manifest.entries))
    enet, pnet, delta, dmos = (np.concatenate(column) for column in zip(*parts))
    image_index = np.concatenate(
        [np.full(len(part[2]), index) for index, part in enumerate(parts)]
    )
    logger.info("Prepared %d patches from %d images", len(delta), len(parts))
    return PatchDataset(enet, pnet, delta, dmos, image_index)


def _batches(count: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    order = rng.permutation(count)
    for start in range(0, count, batch_size):
        yield order[start : start + batch_size]


def _check_loss(loss: float, stage: int, epoch: int) -> None:
    if not np.isfinite(loss):
        raise NumericError(f"non-finite stage-{stage} loss in epoch {epoch}")


def train_stage1(
    manifest: DatasetManifest,
    cfg: TrainConfig,
    seed: int,
    dataset: PatchDataset | None = None,
) -> ModelBundle:
    """Fresh bundle with a trained noise estimator; P-Net and gain stay at init."""

    if dataset is None:
        dataset = build_patch_dataset(manifest, cfg)
    bundle = ModelBundle.initialize(cfg.model, seed)
    enet = bundle.enet
    head_target = max(float(np.mean(dataset.delta_targets)), HEAD_TARGET_FLOOR)
    enet.head.bias.value[...] = softplus_inverse(head_target)

    enet.set_rng(seeded_rng(seed, DROPOUT_STREAM))
    shuffle = seeded_rng(seed, SHUFFLE_STREAM)
    optimizer = Adam(lr=cfg.learning_rate)
    losses: list[float] = []
    for epoch in range(1, cfg.epochs_stage1 + 1):
        total = 0.0
        for batch in _batches(len(dataset), cfg.batch_size, shuffle):
            enet.params.zero_grad()
            pred = enet.forward(dataset.enet_inputs[batch], training=True)[:, 0]
            target = dataset.delta_targets[batch]
            loss = l1_loss(pred, target)
            _check_loss(loss, 1, epoch)
            enet.backward(l1_loss_grad(pred, target)[:, np.newaxis])
            optimizer.step(enet.params)
            total += loss * len(batch)
        losses.append(total / len(dataset))
        logger.info("Stage 1 epoch %d/%d: L1 %.6g", epoch, cfg.epochs_stage1, losses[-1])
    enet.set_rng(None)
    bundle.history["stage1"] = losses
    return bundle


def _initial_kappa(delta_hat: np.ndarray, t_resist: np.ndarray, target: float) -> float | None:
    """Gain at which the mean initial score equals ``target``; None when unattainable."""

    ratio = delta_hat / t_resist

    def gap(k: float) -> float:
        return float(np.mean(np.tanh(k * ratio))) - target

    low, high = 1e-6, 1e6
    if target <= 0 or not gap(low) < 0 < gap(high):
        return None
    return brentq(gap, low, high, xtol=1e-10)


def train_stage2(
    manifest: DatasetManifest,
    cfg: TrainConfig,
    bundle: ModelBundle,
    seed: int,
    dataset: PatchDataset | None = None,
) -> ModelBundle:
    """Freeze E-Net and fit P-Net and kappa to the global scores, in place."""

    if bundle.config != cfg.model:
        raise ConfigError("stage-2 model config differs from the stage-1 bundle")
    if dataset is None:
        dataset = build_patch_dataset(manifest, cfg)
    enet_params = bundle.enet.params
    enet_params.freeze()
    frozen_digest = enet_params.digest()

    # The frozen estimator is a constant function, so its outputs are computed once.
    delta_hat = estimate_noise(bundle, dataset.enet_inputs, cfg.batch_size)

    pnet = bundle.pnet
    pnet.calibrate(dataset.pnet_inputs)
    pnet.head.bias.value[...] = softplus_inverse(1.0 - PNET_EPSILON)
    t_initial = estimate_resistance(bundle, dataset.pnet_inputs, cfg.batch_size)
    k = _initial_kappa(delta_hat, t_initial, float(np.mean(dataset.dmos_targets)))
    if k is None:
        logger.warning("Initial gain cannot match the mean score; keeping k=%.4g", bundle.k)
    else:
        bundle.kappa.value[...] = kappa_for_gain(k)
        logger.info("Initial mixing gain k=%.6g", k)

    mixing = MixingLayer(bundle.kappa)
    trainable = [*pnet.params, bundle.kappa]
    shuffle = seeded_rng(seed, STAGE2_SHUFFLE_STREAM)
    optimizer = Adam(lr=cfg.learning_rate)
    losses: list[float] = []
    for epoch in range(1, cfg.epochs_stage2 + 1):
        total = 0.0
        for batch in _batches(len(dataset), cfg.batch_size, shuffle):
            pnet.params.zero_grad()
            bundle.kappa.zero_grad()
            t_resist = pnet.forward(dataset.pnet_inputs[batch], training=True)[:, 0]
            pred = mixing.forward(delta_hat[batch], t_resist)
            target = dataset.dmos_targets[batch]
            loss = l1_loss(pred, target)
            _check_loss(loss, 2, epoch)
            _, grad_t = mixing.backward(l1_loss_grad(pred, target))
            pnet.backward(grad_t[:, np.newaxis])
            optimizer.step(trainable)
            total += loss * len(batch)
        losses.append(total / len(dataset))
        logger.info(
            "Stage 2 epoch %d/%d: L1 %.6g, k=%.4g", epoch, cfg.epochs_stage2, losses[-1], bundle.k
        )

    if enet_params.digest() != frozen_digest:
        raise TrainingError("E-Net parameters changed while frozen")
    bundle.history["stage2"] = losses
    return bundle


def train_two_stage(manifest: DatasetManifest, cfg: TrainConfig, seed: int) -> ModelBundle:
    dataset = build_patch_dataset(manifest, cfg)
    bundle = train_stage1(manifest, cfg, seed, dataset=dataset)
    return train_stage2(manifest, cfg, bundle, seed, dataset=dataset)

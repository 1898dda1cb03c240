"""Error-resistance estimator over the augmented (luminance, variance, MSCN) input."""

from __future__ import annotations

import logging

import numpy as np

from ..nn import ChannelScale, Conv2D, Dense, Flatten, MaxPool2, Sequential, ShapeError, Softplus
from .config import ModelConfig
from .enet import activation_layer

logger = logging.getLogger(__name__)

PNET_EPSILON = 1e-3
FEATURE_CHANNELS = 3


def _flatten_size(config: ModelConfig) -> int:
    size = config.patch_size - 2
    if not config.pnet_no_pool:
        size //= 2
    size -= 2
    if not config.pnet_no_pool:
        size //= 2
    return 128 * size * size


class PNet:
    """Channel scaling → conv3(64) → conv3(128) → dense(100) → dense(100) → dense(1).

    A 2x2 pool follows each convolution unless ``pnet_no_pool`` is set. The
    output is ``softplus + 1e-3`` and therefore strictly positive.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        act = config.activation
        self.scale = ChannelScale("pnet.scale", FEATURE_CHANNELS)
        self.head = Dense("pnet.head", 100, 1, rng)

        layers = [self.scale, Conv2D("pnet.conv1", FEATURE_CHANNELS, 64, 3, rng)]
        layers.append(activation_layer(act, "pnet.act1"))
        if not config.pnet_no_pool:
            layers.append(MaxPool2("pnet.pool1"))
        layers += [Conv2D("pnet.conv2", 64, 128, 3, rng), activation_layer(act, "pnet.act2")]
        if not config.pnet_no_pool:
            layers.append(MaxPool2("pnet.pool2"))
        layers += [
            Flatten("pnet.flatten"),
            Dense("pnet.fc1", _flatten_size(config), 100, rng),
            activation_layer(act, "pnet.act3"),
            Dense("pnet.fc2", 100, 100, rng),
            activation_layer(act, "pnet.act4"),
            self.head,
            Softplus("pnet.out"),
        ]
        self.network = Sequential(layers)
        self.params = self.network.params

    def _check(self, x: np.ndarray) -> None:
        size = self.config.patch_size
        if x.ndim != 4 or x.shape[1:] != (FEATURE_CHANNELS, size, size):
            raise ShapeError(
                f"P-Net expects (N, {FEATURE_CHANNELS}, {size}, {size}) input, got {x.shape}"
            )

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._check(x)
        return self.network.forward(x, training=training) + PNET_EPSILON

    def backward(self, grad: np.ndarray, need_input_grad: bool = False) -> np.ndarray | None:
        return self.network.backward(grad, need_input_grad=need_input_grad)

    def calibrate(self, features: np.ndarray) -> np.ndarray:
        """Set each channel's fixed scale to 1 / RMS over a calibration batch."""

        rms = np.sqrt(np.mean(np.square(features), axis=(0, 2, 3)))
        calibration = np.ones(FEATURE_CHANNELS)
        for channel, value in enumerate(rms):
            if value > 0 and np.isfinite(value):
                calibration[channel] = 1.0 / value
            else:
                logger.warning("Feature channel %d is constant zero; leaving scale at 1", channel)
        self.scale.calibration.value[...] = calibration
        return calibration

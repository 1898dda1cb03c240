"""Noise estimator: predicts a patch's mean absolute distortion from the distorted patch."""

from __future__ import annotations

import numpy as np

from ..nn import (
    Conv2D,
    Dense,
    Flatten,
    Layer,
    MaxPool2,
    ReLU,
    Sequential,
    ShapeError,
    Softplus,
    SpatialDropout,
    Tanh,
)
from .config import ModelConfig


def activation_layer(kind: str, name: str) -> Layer:
    if kind == "relu":
        return ReLU(name)
    if kind == "tanh":
        return Tanh(name)
    raise ValueError(f"unknown activation {kind!r}")


class ENet:
    """conv7(64) → pool → conv5(128) → pool → conv3(256) → pool → conv1(512) → dense(1).

    Every filtering stage except the 1x1 one is followed by 2x2 pooling and spatial
    dropout; the head is a softplus so the estimate is non-negative. On a 32x32 patch
    the spatial size goes 32, 26, 13, 9, 4, 2, 1.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        act = config.activation
        rate = config.dropout
        self.head = Dense("enet.head", 512, 1, rng)
        self.network = Sequential(
            [
                Conv2D("enet.conv1", 1, 64, 7, rng),
                activation_layer(act, "enet.act1"),
                MaxPool2("enet.pool1"),
                SpatialDropout("enet.drop1", rate),
                Conv2D("enet.conv2", 64, 128, 5, rng),
                activation_layer(act, "enet.act2"),
                MaxPool2("enet.pool2"),
                SpatialDropout("enet.drop2", rate),
                Conv2D("enet.conv3", 128, 256, 3, rng),
                activation_layer(act, "enet.act3"),
                MaxPool2("enet.pool3"),
                SpatialDropout("enet.drop3", rate),
                Conv2D("enet.conv4", 256, 512, 1, rng),
                activation_layer(act, "enet.act4"),
                Flatten("enet.flatten"),
                self.head,
                Softplus("enet.out"),
            ]
        )
        self.params = self.network.params

    def _check(self, x: np.ndarray) -> None:
        size = self.config.patch_size
        if x.ndim != 4 or x.shape[1:] != (1, size, size):
            raise ShapeError(f"E-Net expects (N, 1, {size}, {size}) input, got {x.shape}")

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Map normalized patches ``(N, 1, S, S)`` to estimates ``(N, 1)``."""

        self._check(x)
        return self.network.forward(x, training=training)

    def backward(self, grad: np.ndarray, need_input_grad: bool = False) -> np.ndarray | None:
        return self.network.backward(grad, need_input_grad=need_input_grad)

    def set_rng(self, rng: np.random.Generator | None) -> None:
        self.network.set_rng(rng)

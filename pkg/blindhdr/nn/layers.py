"""Batch-first layers with explicit backward passes.

Every tensor is float64 and shaped ``(N, C, H, W)`` for spatial layers or ``(N, F)``
after flattening. Each layer caches what its backward pass needs during ``forward``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from .params import LayerParams, Parameter, ShapeError, ensure_finite


def _require_ndim(x: np.ndarray, ndim: int, what: str) -> None:
    if x.ndim != ndim:
        raise ShapeError(f"{what} expects a {ndim}-D input, got shape {x.shape}")


# ---------------------------------------------------------------------------
# Functional primitives
# ---------------------------------------------------------------------------


def conv2d_valid(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Valid cross-correlation: ``(N, C, H, W) * (K, C, Fh, Fw) -> (N, K, Ho, Wo)``."""

    _require_ndim(x, 4, "conv2d")
    kernels, channels, fh, fw = weight.shape
    if x.shape[1] != channels:
        raise ShapeError(f"conv2d expects {channels} input channels, got {x.shape[1]}")
    if x.shape[2] < fh or x.shape[3] < fw:
        raise ShapeError(f"conv2d input {x.shape[2:]} is smaller than the {fh}x{fw} kernel")
    windows = sliding_window_view(x, (fh, fw), axis=(2, 3))
    out = np.tensordot(windows, weight, axes=([1, 4, 5], [1, 2, 3]))
    return out.transpose(0, 3, 1, 2) + bias[np.newaxis, :, np.newaxis, np.newaxis]


def conv2d_valid_backward(
    x: np.ndarray, weight: np.ndarray, grad: np.ndarray, need_input_grad: bool = True
) -> tuple[np.ndarray | None, np.ndarray, np.ndarray]:
    """Return ``(dx, dweight, dbias)`` for :func:`conv2d_valid`."""

    _, _, fh, fw = weight.shape
    windows = sliding_window_view(x, (fh, fw), axis=(2, 3))
    dweight = np.tensordot(grad, windows, axes=([0, 2, 3], [0, 2, 3]))
    dbias = grad.sum(axis=(0, 2, 3))
    if not need_input_grad:
        return None, dweight, dbias

    # (N, Ho, Wo, C, Fh, Fw): contribution of every output position to its window.
    dcols = np.tensordot(grad, weight, axes=([1], [0]))
    height_out, width_out = grad.shape[2], grad.shape[3]
    dx = np.zeros_like(x)
    for i in range(fh):
        for j in range(fw):
            dx[:, :, i : i + height_out, j : j + width_out] += dcols[:, :, :, :, i, j].transpose(
                0, 3, 1, 2
            )
    return dx, dweight, dbias


def maxpool2(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2 max pooling with stride 2, floor semantics; returns output and argmax indices."""

    _require_ndim(x, 4, "maxpool2")
    n, c, h, w = x.shape
    ho, wo = h // 2, w // 2
    if ho == 0 or wo == 0:
        raise ShapeError(f"maxpool2 input {h}x{w} is smaller than the 2x2 window")
    blocks = (
        x[:, :, : 2 * ho, : 2 * wo]
        .reshape(n, c, ho, 2, wo, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho, wo, 4)
    )
    # argmax picks the first maximum, so ties route to one position.
    index = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, index[..., np.newaxis], axis=-1)[..., 0]
    return out, index


def maxpool2_backward(
    grad: np.ndarray, index: np.ndarray, input_shape: tuple[int, ...]
) -> np.ndarray:
    n, c, h, w = input_shape
    ho, wo = index.shape[2], index.shape[3]
    dblocks = np.zeros((n, c, ho, wo, 4), dtype=grad.dtype)
    np.put_along_axis(dblocks, index[..., np.newaxis], grad[..., np.newaxis], axis=-1)
    dcrop = (
        dblocks.reshape(n, c, ho, wo, 2, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, 2 * ho, 2 * wo)
    )
    dx = np.zeros(input_shape, dtype=grad.dtype)
    dx[:, :, : 2 * ho, : 2 * wo] = dcrop
    return dx


def dense(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    _require_ndim(x, 2, "dense")
    if x.shape[1] != weight.shape[1]:
        raise ShapeError(f"dense expects {weight.shape[1]} features, got {x.shape[1]}")
    return x @ weight.T + bias


def dense_backward(
    x: np.ndarray, weight: np.ndarray, grad: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(dx, dweight, dbias)`` for :func:`dense`."""

    return grad @ weight, grad.T @ x, grad.sum(axis=0)


def tanh_act(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def tanh_act_backward(output: np.ndarray, grad: np.ndarray) -> np.ndarray:
    return grad * (1.0 - output**2)


def softplus_act(x: np.ndarray) -> np.ndarray:
    """``log(1 + e^x)`` without overflow for large ``x``."""

    return np.logaddexp(0.0, x)


def softplus_act_backward(x: np.ndarray, grad: np.ndarray) -> np.ndarray:
    return grad * expit(x)


def softplus_inverse(y: np.ndarray | float) -> np.ndarray:
    """Inverse of :func:`softplus_act` for positive ``y``."""

    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0):
        raise ValueError("softplus only takes positive values")
    return y + np.log(-np.expm1(-y))


def spatial_dropout(
    x: np.ndarray, rate: float, rng: np.random.Generator | None, training: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    """Drop whole channels with probability ``rate`` and rescale survivors by ``1/(1-rate)``.

    Identity (and no mask) outside training.
    """

    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x, None
    if rng is None:
        raise ValueError("training-mode dropout needs a random generator")
    keep = rng.random((x.shape[0], x.shape[1])) >= rate
    mask = keep.astype(np.float64) / (1.0 - rate)
    return x * mask[:, :, np.newaxis, np.newaxis], mask


# ---------------------------------------------------------------------------
# Layer objects
# ---------------------------------------------------------------------------


class Layer:
    """Base layer: stateless unless it registers parameters."""

    def __init__(self, name: str):
        self.name = name
        self.params: dict[str, Parameter] = {}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        raise NotImplementedError

    def parameters(self) -> Iterable[Parameter]:
        return self.params.values()

    def _register(self, key: str, value: np.ndarray, trainable: bool = True) -> Parameter:
        parameter = Parameter(f"{self.name}.{key}", value, trainable=trainable)
        self.params[key] = parameter
        return parameter

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


def glorot_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Conv2D(Layer):
    def __init__(
        self,
        name: str,
        in_channels: int,
        out_channels: int,
        kernel: int,
        rng: np.random.Generator,
    ):
        super().__init__(name)
        shape = (out_channels, in_channels, kernel, kernel)
        area = kernel * kernel
        self.weight = self._register(
            "weight", glorot_uniform(rng, shape, in_channels * area, out_channels * area)
        )
        self.bias = self._register("bias", np.zeros(out_channels))
        self._input: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._input = x
        return conv2d_valid(x, self.weight.value, self.bias.value)

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        dx, dweight, dbias = conv2d_valid_backward(
            self._input, self.weight.value, grad, need_input_grad
        )
        self.weight.grad += dweight
        self.bias.grad += dbias
        return dx


class Dense(Layer):
    def __init__(self, name: str, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__(name)
        self.weight = self._register(
            "weight", glorot_uniform(rng, (out_features, in_features), in_features, out_features)
        )
        self.bias = self._register("bias", np.zeros(out_features))
        self._input: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._input = x
        return dense(x, self.weight.value, self.bias.value)

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        dx, dweight, dbias = dense_backward(self._input, self.weight.value, grad)
        self.weight.grad += dweight
        self.bias.grad += dbias
        return dx if need_input_grad else None


class MaxPool2(Layer):
    def __init__(self, name: str):
        super().__init__(name)
        self._index: np.ndarray | None = None
        self._shape: tuple[int, ...] = ()

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        out, self._index = maxpool2(x)
        self._shape = x.shape
        return out

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        return maxpool2_backward(grad, self._index, self._shape)


class Flatten(Layer):
    def __init__(self, name: str):
        super().__init__(name)
        self._shape: tuple[int, ...] = ()

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        return grad.reshape(self._shape)


class ReLU(Layer):
    def __init__(self, name: str):
        super().__init__(name)
        self._active: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._active = x > 0
        return np.where(self._active, x, 0.0)

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        return grad * self._active


class Tanh(Layer):
    def __init__(self, name: str):
        super().__init__(name)
        self._output: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._output = tanh_act(x)
        return self._output

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        return tanh_act_backward(self._output, grad)


class Softplus(Layer):
    def __init__(self, name: str):
        super().__init__(name)
        self._input: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._input = x
        return softplus_act(x)

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        return softplus_act_backward(self._input, grad)


class SpatialDropout(Layer):
    def __init__(self, name: str, rate: float):
        super().__init__(name)
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
        self.rate = rate
        self.rng: np.random.Generator | None = None
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        out, self._mask = spatial_dropout(x, self.rate, self.rng, training)
        return out

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        if self._mask is None:
            return grad
        return grad * self._mask[:, :, np.newaxis, np.newaxis]


class ChannelScale(Layer):
    """Per-channel input scaling: trainable weights times fixed calibration constants.

    The effective scale of channel ``c`` is ``weight[c] * calibration[c]``; only the
    weights receive gradients.
    """

    def __init__(self, name: str, channels: int):
        super().__init__(name)
        self.weight = self._register("weight", np.ones(channels))
        self.calibration = self._register("calibration", np.ones(channels), trainable=False)
        self._input: np.ndarray | None = None

    def effective_scale(self) -> np.ndarray:
        return self.weight.value * self.calibration.value

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        _require_ndim(x, 4, "channel scale")
        if x.shape[1] != self.weight.value.shape[0]:
            raise ShapeError(
                f"channel scale expects {self.weight.value.shape[0]} channels, got {x.shape[1]}"
            )
        self._input = x
        return x * self.effective_scale()[np.newaxis, :, np.newaxis, np.newaxis]

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        self.weight.grad += (grad * self._input).sum(axis=(0, 2, 3)) * self.calibration.value
        if not need_input_grad:
            return None
        return grad * self.effective_scale()[np.newaxis, :, np.newaxis, np.newaxis]


class Sequential:
    """Ordered stack of layers sharing one parameter namespace."""

    def __init__(self, layers: Sequence[Layer]):
        self.layers = list(layers)
        self.params = LayerParams(p for layer in self.layers for p in layer.parameters())

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = ensure_finite("network input", np.asarray(x, dtype=np.float64))
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return ensure_finite("network output", x)

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None:
        ensure_finite("output gradient", grad)
        for position in range(len(self.layers) - 1, -1, -1):
            wants_input = need_input_grad or position > 0
            grad = self.layers[position].backward(grad, need_input_grad=wants_input)
        return grad

    def set_rng(self, rng: np.random.Generator | None) -> None:
        for layer in self.layers:
            if isinstance(layer, SpatialDropout):
                layer.rng = rng

    def __iter__(self):
        return iter(self.layers)

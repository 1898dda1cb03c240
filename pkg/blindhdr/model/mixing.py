"""Combines noise and error resistance into a visible-distortion score."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..nn import Parameter, softplus_act, softplus_inverse

BELOW_ONE = np.nextafter(1.0, 0.0)


def gain(kappa: float) -> float:
    """The mixing gain ``k = softplus(kappa)``, always positive."""

    return float(softplus_act(np.float64(kappa)))


def kappa_for_gain(k: float) -> float:
    """Inverse of :func:`gain`."""

    if k <= 0:
        raise ValueError("the mixing gain must be positive")
    return float(softplus_inverse(k))


def mix(delta_hat: np.ndarray, t_resist: np.ndarray, kappa: float) -> np.ndarray:
    """``tanh(softplus(kappa) * delta_hat / t_resist)``, kept strictly below 1."""

    t_resist = np.asarray(t_resist, dtype=np.float64)
    if np.any(t_resist <= 0):
        raise ValueError("error resistance must be strictly positive")
    out = np.tanh(gain(kappa) * np.asarray(delta_hat, dtype=np.float64) / t_resist)
    return np.minimum(out, BELOW_ONE)


class MixingLayer:
    """The mixing function as a layer with the trainable raw gain ``kappa``."""

    def __init__(self, kappa: Parameter):
        self.kappa = kappa
        self._cache: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    def forward(self, delta_hat: np.ndarray, t_resist: np.ndarray) -> np.ndarray:
        out = mix(delta_hat, t_resist, float(self.kappa.value))
        self._cache = (np.asarray(delta_hat, dtype=np.float64), t_resist, out)
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return gradients for ``(delta_hat, t_resist)`` and accumulate the kappa gradient."""

        delta_hat, t_resist, out = self._cache
        kappa = float(self.kappa.value)
        k = gain(kappa)
        dz = grad * (1.0 - out**2)
        self.kappa.grad += np.sum(dz * delta_hat / t_resist) * expit(kappa)
        return dz * k / t_resist, -dz * k * delta_hat / t_resist**2

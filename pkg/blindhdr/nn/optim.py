"""Adam optimizer operating in place on :class:`Parameter` objects."""

from __future__ import annotations

import logging
from typing import Iterable

import numpy as np

from .params import Parameter, ensure_finite

logger = logging.getLogger(__name__)


class Adam:
    def __init__(
        self,
        lr: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def step(self, params: Iterable[Parameter]) -> None:
        """Update every trainable parameter from its accumulated gradient.

        Frozen parameters are skipped entirely. A non-finite gradient aborts the
        update before any parameter changes.
        """

        trainable = [parameter for parameter in params if parameter.trainable]
        for parameter in trainable:
            ensure_finite(f"gradient for {parameter.name}", parameter.grad)

        for parameter in trainable:
            parameter.step += 1
            parameter.first_moment *= self.beta1
            parameter.first_moment += (1.0 - self.beta1) * parameter.grad
            parameter.second_moment *= self.beta2
            parameter.second_moment += (1.0 - self.beta2) * parameter.grad**2
            m_hat = parameter.first_moment / (1.0 - self.beta1**parameter.step)
            v_hat = parameter.second_moment / (1.0 - self.beta2**parameter.step)
            parameter.value -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
            ensure_finite(parameter.name, parameter.value)


def adam_step(
    params: Iterable[Parameter],
    lr: float = 0.001,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    Adam(lr=lr, beta1=beta1, beta2=beta2, eps=eps).step(params)

"""The full chain: E-Net and P-Net feeding the mixing layer, with an L1 objective."""

from __future__ import annotations

import numpy as np

from ..nn import GradientCheckReport, NumericError, gradient_check, l1_loss, l1_loss_grad
from ..nn.gradcheck import DEFAULT_MAX_ENTRIES, DEFAULT_TOLERANCE
from .bundle import ModelBundle
from .mixing import MixingLayer


def chain_forward(
    bundle: ModelBundle,
    enet_inputs: np.ndarray,
    pnet_inputs: np.ndarray,
    training: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, MixingLayer]:
    mixing = MixingLayer(bundle.kappa)
    delta_hat = bundle.enet.forward(enet_inputs, training=training)[:, 0]
    t_resist = bundle.pnet.forward(pnet_inputs, training=training)[:, 0]
    return delta_hat, t_resist, mixing.forward(delta_hat, t_resist), mixing


def chain_loss(
    bundle: ModelBundle, enet_inputs: np.ndarray, pnet_inputs: np.ndarray, target: np.ndarray
) -> float:
    _, _, dmos, _ = chain_forward(bundle, enet_inputs, pnet_inputs)
    return l1_loss(dmos, target)


def chain_backward(
    bundle: ModelBundle,
    enet_inputs: np.ndarray,
    pnet_inputs: np.ndarray,
    target: np.ndarray,
    training: bool = False,
) -> float:
    """Forward and backward through both networks; gradients accumulate in place."""

    _, _, dmos, mixing = chain_forward(bundle, enet_inputs, pnet_inputs, training=training)
    loss = l1_loss(dmos, target)
    if not np.isfinite(loss):
        raise NumericError("non-finite loss through the full chain")
    grad_delta, grad_t = mixing.backward(l1_loss_grad(dmos, target))
    bundle.enet.backward(grad_delta[:, np.newaxis])
    bundle.pnet.backward(grad_t[:, np.newaxis])
    return loss


def chain_gradient_check(
    bundle: ModelBundle,
    enet_inputs: np.ndarray,
    pnet_inputs: np.ndarray,
    target: np.ndarray,
    tolerance: float = DEFAULT_TOLERANCE,
    max_entries: int = DEFAULT_MAX_ENTRIES,
    seed: int = 0,
) -> GradientCheckReport:
    """Finite-difference check of the end-to-end L1 gradient for every chain parameter.

    Dropout is off because every pass runs in inference mode. The fixed P-Net
    calibration constants are left out.
    """

    calibration = bundle.pnet.scale.calibration
    params = [parameter for parameter in bundle.tensors() if parameter is not calibration]

    return gradient_check(
        lambda: chain_loss(bundle, enet_inputs, pnet_inputs, target),
        lambda: chain_backward(bundle, enet_inputs, pnet_inputs, target),
        params,
        tolerance=tolerance,
        max_entries=max_entries,
        rng=np.random.default_rng(seed),
    )

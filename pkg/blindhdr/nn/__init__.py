"""A small differentiable layer stack: layers with analytic gradients, Adam and L1."""

from .gradcheck import GradientCheckReport, check_layer, gradient_check
from .layers import (
    ChannelScale,
    Conv2D,
    Dense,
    Flatten,
    Layer,
    MaxPool2,
    ReLU,
    Sequential,
    Softplus,
    SpatialDropout,
    Tanh,
    conv2d_valid,
    conv2d_valid_backward,
    dense,
    dense_backward,
    maxpool2,
    maxpool2_backward,
    softplus_act,
    softplus_act_backward,
    softplus_inverse,
    spatial_dropout,
    tanh_act,
    tanh_act_backward,
)
from .loss import l1_loss, l1_loss_grad
from .optim import Adam, adam_step
from .params import LayerParams, NumericError, Parameter, ShapeError, ensure_finite

__all__ = [
    "Adam",
    "ChannelScale",
    "Conv2D",
    "Dense",
    "Flatten",
    "GradientCheckReport",
    "Layer",
    "LayerParams",
    "MaxPool2",
    "NumericError",
    "Parameter",
    "ReLU",
    "Sequential",
    "ShapeError",
    "Softplus",
    "SpatialDropout",
    "Tanh",
    "adam_step",
    "check_layer",
    "conv2d_valid",
    "conv2d_valid_backward",
    "dense",
    "dense_backward",
    "ensure_finite",
    "gradient_check",
    "l1_loss",
    "l1_loss_grad",
    "maxpool2",
    "maxpool2_backward",
    "softplus_act",
    "softplus_act_backward",
    "softplus_inverse",
    "spatial_dropout",
    "tanh_act",
    "tanh_act_backward",
]

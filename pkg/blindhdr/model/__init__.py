"""Noise and error-resistance networks, the mixing layer, training and weight files."""

from .bundle import ModelBundle
from .config import ModelConfig, TrainConfig
from .enet import ENet
from .mixing import MixingLayer, gain, kappa_for_gain, mix
from .network import chain_backward, chain_gradient_check, chain_loss
from .pnet import PNET_EPSILON, PNet
from .predict import (
    ImagePrediction,
    PatchPrediction,
    enet_forward,
    pnet_forward,
    predict_image,
    predict_patches,
)
from .serialization import BundleError, load_bundle, save_bundle
from .trainer import (
    PatchDataset,
    TrainingError,
    build_patch_dataset,
    train_stage1,
    train_stage2,
    train_two_stage,
)

__all__ = [
    "PNET_EPSILON",
    "BundleError",
    "ENet",
    "ImagePrediction",
    "MixingLayer",
    "ModelBundle",
    "ModelConfig",
    "PNet",
    "PatchDataset",
    "PatchPrediction",
    "TrainConfig",
    "TrainingError",
    "build_patch_dataset",
    "chain_backward",
    "chain_gradient_check",
    "chain_loss",
    "enet_forward",
    "gain",
    "kappa_for_gain",
    "load_bundle",
    "mix",
    "pnet_forward",
    "predict_image",
    "predict_patches",
    "save_bundle",
    "train_stage1",
    "train_stage2",
    "train_two_stage",
]

"""Perceptual transforms, feature maps, patch grids and the per-patch noise target."""

from __future__ import annotations

import numpy as np

from .features import (
    FeatureStack,
    feature_batch,
    feature_stack,
    gaussian_window,
    mscn_map,
    variance_map,
)
from .patches import PatchGridError, PatchSet, extract_patches, grid_shape, patch_delta
from .pu import CurveError, PuCurve, default_pu_curve, load_pu_curve, pu_encode, save_pu_curve
from .tonemap import (
    Reinhard05Params,
    ToneMapError,
    photoreceptor_response,
    tmo_drago,
    tmo_reinhard02,
    tmo_reinhard05,
)

DRAGO_LD_MAX = 100.0


def input_peak(mode: str, l_peak: float) -> float:
    """Return the value network inputs are divided by for a preprocessing mode.

    ``l_peak`` for linear luminance, the nominal upper end of the transformed range
    otherwise.
    """

    if mode == "linear":
        return l_peak
    if mode == "pu":
        return float(pu_encode(np.array(l_peak), default_pu_curve()))
    if mode == "drago":
        return DRAGO_LD_MAX * 0.01
    if mode in ("reinhard02", "reinhard05"):
        return 1.0
    raise ValueError(f"unknown preprocessing mode {mode!r}")


def preprocess_luminance(
    lum: np.ndarray, mode: str, l_peak: float
) -> tuple[np.ndarray, float]:
    """Apply a preprocessing mode and return the plane plus its input normalization peak."""

    peak = input_peak(mode, l_peak)
    lum = np.asarray(lum, dtype=np.float64)
    if mode == "linear":
        return lum, peak
    if mode == "pu":
        return pu_encode(lum, default_pu_curve()), peak
    if mode == "drago":
        return tmo_drago(lum, ld_max=DRAGO_LD_MAX), peak
    if mode == "reinhard02":
        return tmo_reinhard02(lum), peak
    return tmo_reinhard05(lum), peak


__all__ = [
    "CurveError",
    "FeatureStack",
    "PatchGridError",
    "PatchSet",
    "PuCurve",
    "Reinhard05Params",
    "ToneMapError",
    "default_pu_curve",
    "extract_patches",
    "feature_batch",
    "feature_stack",
    "gaussian_window",
    "grid_shape",
    "input_peak",
    "load_pu_curve",
    "mscn_map",
    "patch_delta",
    "photoreceptor_response",
    "preprocess_luminance",
    "pu_encode",
    "save_pu_curve",
    "tmo_drago",
    "tmo_reinhard02",
    "tmo_reinhard05",
    "variance_map",
]

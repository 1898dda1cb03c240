"""Gaussian-window feature maps: local variance, MSCN, and the P-Net feature stack."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.ndimage import correlate1d

DEFAULT_WINDOW = 7
DEFAULT_SIGMA = 7.0 / 6.0
PNET_MSCN_C = 0.01
BRISQUE_MSCN_C = 1.0


@lru_cache(maxsize=16)
def _gaussian_1d(window: int, sigma_w: float) -> np.ndarray:
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd size, got {window}")
    radius = window // 2
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets**2) / (2.0 * sigma_w**2))
    weights /= weights.sum()
    weights.flags.writeable = False
    return weights


def gaussian_window(window: int = DEFAULT_WINDOW, sigma_w: float = DEFAULT_SIGMA) -> np.ndarray:
    """Return the normalized ``window x window`` Gaussian kernel."""

    weights = _gaussian_1d(window, sigma_w)
    return np.outer(weights, weights)


def _check_window(img: np.ndarray, window: int) -> None:
    if img.ndim != 2:
        raise ValueError(f"feature maps need a single-channel 2-D image, got {img.shape}")
    if window > min(img.shape):
        raise ValueError(f"window {window} exceeds image dimensions {img.shape}")


def _smooth(img: np.ndarray, window: int, sigma_w: float) -> np.ndarray:
    weights = _gaussian_1d(window, sigma_w)
    rows = correlate1d(img, weights, axis=0, mode="reflect")
    return correlate1d(rows, weights, axis=1, mode="reflect")


def _local_moments(
    img: np.ndarray, window: int, sigma_w: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the centred image, local mean and local variance (both of the centred image).

    Centring on the global mean leaves the variance unchanged and makes flat regions
    cancel exactly.
    """

    img = np.asarray(img, dtype=np.float64)
    _check_window(img, window)
    centred = img - np.mean(img)
    mu = _smooth(centred, window, sigma_w)
    var = _smooth(centred * centred, window, sigma_w) - mu * mu
    return centred, mu, np.maximum(var, 0.0)


def variance_map(
    img: np.ndarray, window: int = DEFAULT_WINDOW, sigma_w: float = DEFAULT_SIGMA
) -> np.ndarray:
    """Gaussian-weighted local variance ``E_w[I²] - E_w[I]²``, clamped at zero."""

    _, _, var = _local_moments(img, window, sigma_w)
    return var


def mscn_map(
    img: np.ndarray,
    window: int = DEFAULT_WINDOW,
    sigma_w: float = DEFAULT_SIGMA,
    c: float = PNET_MSCN_C,
) -> np.ndarray:
    """Mean-subtracted contrast-normalized coefficients ``(I - μ) / (σ + c)``.

    Where the denominator vanishes (``c == 0`` on a flat region) the result is 0.
    """

    if c < 0:
        raise ValueError("the stabilizing constant must be non-negative")
    centred, mu, var = _local_moments(img, window, sigma_w)
    numerator = centred - mu
    denominator = np.sqrt(var) + c
    return np.divide(
        numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0
    )


@dataclass(frozen=True)
class FeatureStack:
    """The three raw channels of the augmented input layer for one patch."""

    lum: np.ndarray
    var: np.ndarray
    mscn: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.lum, self.var, self.mscn])


def feature_stack(patch: np.ndarray) -> FeatureStack:
    """Luminance, local variance and MSCN (c = 0.01) of one linear-luminance patch."""

    patch = np.asarray(patch, dtype=np.float64)
    return FeatureStack(
        lum=patch.copy(),
        var=variance_map(patch),
        mscn=mscn_map(patch, c=PNET_MSCN_C),
    )


def feature_batch(patches: np.ndarray) -> np.ndarray:
    """Stack features of ``(P, S, S)`` patches into a ``(P, 3, S, S)`` network input."""

    return np.stack([feature_stack(patch).as_array() for patch in patches])

"""Global tone mapping operators used as optional preprocessing."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

LOG_AVERAGE_DELTA = 1e-6


class ToneMapError(ValueError):
    """Raised when an operator cannot adapt to the input (e.g. an all-zero image)."""


def _require_signal(lum: np.ndarray) -> np.ndarray:
    lum = np.asarray(lum, dtype=np.float64)
    if lum.size == 0 or np.max(lum) <= 0:
        raise ToneMapError("tone mapping needs an image with positive luminance")
    if np.min(lum) < 0:
        raise ToneMapError("tone mapping needs non-negative luminance")
    return lum


def log_average(lum: np.ndarray, delta: float = LOG_AVERAGE_DELTA) -> float:
    return float(np.exp(np.mean(np.log(delta + lum))))


def tmo_drago(lum: np.ndarray, bias: float = 0.85, ld_max: float = 100.0) -> np.ndarray:
    """Adaptive logarithmic mapping; the brightest pixel maps to ``0.01 * ld_max``."""

    lum = _require_signal(lum)
    l_max = float(np.max(lum))
    exponent = np.log(bias) / np.log(0.5)
    scale = ld_max * 0.01 / np.log10(l_max + 1.0)
    denominator = np.log(2.0 + 8.0 * np.power(lum / l_max, exponent))
    return scale * np.log(lum + 1.0) / denominator


def tmo_reinhard02(lum: np.ndarray, key: float = 0.18) -> np.ndarray:
    """Global photographic operator: key scaling by log-average then ``L / (1 + L)``."""

    lum = _require_signal(lum)
    scaled = (key / log_average(lum)) * lum
    return scaled / (1.0 + scaled)


@dataclass(frozen=True)
class Reinhard05Params:
    """Photoreceptor operator parameters; ``contrast=None`` derives m from the image key."""

    intensity: float = 0.0
    contrast: float | None = None
    light_adaptation: float = 1.0
    chromatic_adaptation: float = 0.0


def photoreceptor_response(intensity: np.ndarray, sigma: np.ndarray | float) -> np.ndarray:
    intensity, sigma = np.broadcast_arrays(
        np.asarray(intensity, dtype=np.float64), np.asarray(sigma, dtype=np.float64)
    )
    denominator = intensity + sigma
    # Black pixels under local adaptation have I == σ == 0.
    return np.divide(
        intensity, denominator, out=np.zeros_like(denominator), where=denominator > 0
    )


def _default_contrast(lum: np.ndarray) -> float:
    log_lum = np.log(LOG_AVERAGE_DELTA + lum)
    log_min, log_max = float(np.min(log_lum)), float(np.max(log_lum))
    if log_max == log_min:
        logger.debug("Flat log luminance, falling back to contrast 0.3")
        return 0.3
    key = (log_max - float(np.mean(log_lum))) / (log_max - log_min)
    return 0.3 + 0.7 * key**1.4


def reinhard05_adaptation(image: np.ndarray, params: Reinhard05Params) -> np.ndarray:
    """Return the adaptation level σ per pixel (and channel, for colour input)."""

    image = _require_signal(image)
    lum = image if image.ndim == 2 else image @ np.array([0.2126, 0.7152, 0.0722])
    contrast = params.contrast if params.contrast is not None else _default_contrast(lum)
    brightness = np.exp(-params.intensity)

    c = params.chromatic_adaptation
    a = params.light_adaptation
    if image.ndim == 2:
        local = image
        global_level = float(np.mean(image))
    else:
        local = c * image + (1.0 - c) * lum[:, :, np.newaxis]
        global_level = c * np.mean(image, axis=(0, 1)) + (1.0 - c) * float(np.mean(lum))
    adapted = a * local + (1.0 - a) * global_level
    return np.power(brightness * adapted, contrast)


def tmo_reinhard05(image: np.ndarray, params: Reinhard05Params | None = None) -> np.ndarray:
    """Photoreceptor sigmoid ``V = I / (I + σ)``; output lies in ``[0, 1)``."""

    params = params or Reinhard05Params()
    image = _require_signal(image)
    sigma = reinhard05_adaptation(image, params)
    return photoreceptor_response(image, sigma)

"""Chirped, amplitude-modulated sinusoidal gratings for probing error resistance."""

from __future__ import annotations

import numpy as np

from ..hdrio import HdrImage

DEFAULT_SIZE = 800
DEFAULT_PEAK = 4000.0
START_FREQUENCY = 1.0 / 200.0
END_FREQUENCY = 1.0 / 4.0
MIN_AMPLITUDE = 0.05
# sin(2π · 0.25) == 1, so the pixel at x = 0, y = 0 sits exactly at the peak.
PHASE_OFFSET = 0.25


def chirp_phase(x: np.ndarray, width: int) -> np.ndarray:
    """Phase in cycles; the local frequency rises linearly from start to end along x."""

    x = np.asarray(x, dtype=np.float64)
    span = max(width - 1, 1)
    sweep = (END_FREQUENCY - START_FREQUENCY) / (2.0 * span)
    return PHASE_OFFSET + START_FREQUENCY * x + sweep * x * x


def amplitude(y: np.ndarray, height: int) -> np.ndarray:
    """Linear fall-off from 1 at the top row to ``MIN_AMPLITUDE`` at the bottom."""

    y = np.asarray(y, dtype=np.float64)
    span = max(height - 1, 1)
    return 1.0 - (1.0 - MIN_AMPLITUDE) * y / span


def grating_value(x: float, y: float, width: int, height: int, peak: float) -> float:
    """Luminance of a single grating pixel."""

    wave = 0.5 * (1.0 + np.sin(2.0 * np.pi * chirp_phase(x, width)))
    return float(peak * wave * amplitude(y, height))


def make_grating(
    width: int = DEFAULT_SIZE, height: int = DEFAULT_SIZE, peak: float = DEFAULT_PEAK
) -> HdrImage:
    if width < 1 or height < 1:
        raise ValueError(f"grating dimensions must be positive, got {width}x{height}")
    if peak <= 0:
        raise ValueError("grating peak must be positive")
    wave = 0.5 * (1.0 + np.sin(2.0 * np.pi * chirp_phase(np.arange(width), width)))
    rows = amplitude(np.arange(height), height)
    return HdrImage(peak * wave[np.newaxis, :] * rows[:, np.newaxis])

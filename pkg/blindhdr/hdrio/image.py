"""In-memory HDR image container and luminance extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Rec.709 primaries.
REC709_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])


class HdrFormatError(ValueError):
    """Raised when an HDR file or image buffer violates the format or value invariants."""


@dataclass(frozen=True)
class HdrImage:
    """Linear radiance image stored top-down as a ``(height, width, channels)`` array.

    Values are treated directly as cd/m²; no exposure calibration is applied.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        data = self.data
        if data.ndim == 2:
            data = data[:, :, np.newaxis]
            object.__setattr__(self, "data", data)
        if data.ndim != 3 or data.shape[2] not in (1, 3):
            raise HdrFormatError(f"expected 1 or 3 channels, got array of shape {data.shape}")
        if data.size and not np.all(np.isfinite(data)):
            raise HdrFormatError("image contains non-finite values")
        if data.size and np.min(data) < 0:
            raise HdrFormatError("image contains negative radiance")

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    def plane(self) -> np.ndarray:
        """Return the single channel as a float64 ``(height, width)`` array."""

        if self.channels != 1:
            raise HdrFormatError("plane() requires a single-channel image")
        return self.data[:, :, 0].astype(np.float64)

    def scaled(self, factor: float) -> HdrImage:
        return HdrImage(self.data * factor)


def luminance(image: HdrImage) -> HdrImage:
    """Return the Rec.709 luminance of ``image``; single-channel input passes through."""

    if image.channels == 1:
        return image
    lum = image.data.astype(np.float64) @ REC709_WEIGHTS
    return HdrImage(lum[:, :, np.newaxis])

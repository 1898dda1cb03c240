"""Blue-green-red heatmaps of quality maps, written as 8-bit PPM or PNG."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from PIL import Image

from ..utility.files import atomic_write
from .quality_map import QualityMap

logger = logging.getLogger(__name__)

FORMATS = {".ppm": "PPM", ".png": "PNG"}


def colormap(values: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to RGB: 0 blue, 0.5 green, 1 red, linear in between."""

    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    low = np.clip(v / 0.5, 0.0, 1.0)
    high = np.clip((v - 0.5) / 0.5, 0.0, 1.0)
    lower_half = v <= 0.5
    red = np.where(lower_half, 0.0, high)
    green = np.where(lower_half, low, 1.0 - high)
    blue = np.where(lower_half, 1.0 - low, 0.0)
    return np.rint(np.stack([red, green, blue], axis=-1) * 255.0).astype(np.uint8)


def heatmap_pixels(qmap: QualityMap, block: int | None = None) -> np.ndarray:
    """Normalized, colour-mapped map with every patch drawn as a ``block x block`` square."""

    if not np.all(np.isfinite(qmap.values)):
        raise ValueError("cannot render a map with non-finite values")
    block = block or qmap.patch_size
    rgb = colormap(qmap.normalized().values)
    return np.repeat(np.repeat(rgb, block, axis=0), block, axis=1)


def render_heatmap(qmap: QualityMap, out: str | Path, block: int | None = None) -> Path:
    target = Path(out)
    fmt = FORMATS.get(target.suffix.lower())
    if fmt is None:
        raise ValueError(f"heatmaps are written as .ppm or .png, not {target.suffix!r}")
    image = Image.fromarray(heatmap_pixels(qmap, block), mode="RGB")
    atomic_write(target, lambda tmp: image.save(tmp, format=fmt))
    logger.info("Wrote heatmap %s (%dx%d)", target, image.width, image.height)
    return target

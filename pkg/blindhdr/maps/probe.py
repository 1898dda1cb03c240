"""Error-resistance probes: the P-Net output alone over an image's patch grid."""

from __future__ import annotations

from typing import Sequence

from ..hdrio import HdrImage, luminance
from ..model import ModelBundle
from ..model.inputs import prepare_inputs
from ..model.predict import estimate_resistance
from .grating import DEFAULT_PEAK, DEFAULT_SIZE, make_grating
from .quality_map import QualityMap


def probe_resistance(bundle: ModelBundle, image: HdrImage, stride: int = 32) -> QualityMap:
    inputs = prepare_inputs(luminance(image).plane(), bundle.config, stride)
    grid = inputs.grid
    t_resist = estimate_resistance(bundle, inputs.pnet)
    return QualityMap(
        values=t_resist.reshape(grid.grid_dims),
        patch_size=grid.size,
        stride=grid.stride,
        source_dims=grid.source_dims,
    )


def probe_scales(
    bundle: ModelBundle,
    scales: Sequence[float],
    width: int = DEFAULT_SIZE,
    height: int = DEFAULT_SIZE,
    peak: float = DEFAULT_PEAK,
    stride: int = 32,
) -> dict[float, QualityMap]:
    """T maps of the grating at several luminance scale factors."""

    return {
        scale: probe_resistance(bundle, make_grating(width, height, peak * scale), stride)
        for scale in scales
    }

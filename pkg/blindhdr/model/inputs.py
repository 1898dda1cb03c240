"""Turn a luminance plane into the two networks' input batches."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..preprocess import PatchSet, extract_patches, feature_batch, preprocess_luminance
from .config import ModelConfig


@dataclass(frozen=True)
class ModelInputs:
    grid: PatchSet
    enet: np.ndarray
    pnet: np.ndarray

    def __len__(self) -> int:
        return len(self.grid)


def prepare_inputs(lum: np.ndarray, config: ModelConfig, stride: int) -> ModelInputs:
    """Preprocess, cut into patches and build ``(N, 1, S, S)`` and ``(N, 3, S, S)`` batches.

    E-Net sees patches divided by the mode's input peak; P-Net sees raw feature stacks
    and scales them itself.
    """

    plane, peak = preprocess_luminance(lum, config.preprocess, config.l_peak)
    grid = extract_patches(plane, config.patch_size, stride)
    return ModelInputs(
        grid=grid,
        enet=grid.patches[:, np.newaxis] / peak,
        pnet=feature_batch(grid.patches),
    )

"""Patch grids over luminance planes and the per-patch noise target."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

DEFAULT_PATCH_SIZE = 32
DEFAULT_STRIDE = 32


class PatchGridError(ValueError):
    """Raised when an image cannot hold a patch or two patch grids disagree."""


@dataclass(frozen=True)
class PatchSet:
    """Fully contained ``size x size`` patches on a row-major grid."""

    patches: np.ndarray
    coords: np.ndarray
    source_dims: tuple[int, int]
    size: int
    stride: int

    def __len__(self) -> int:
        return int(self.patches.shape[0])

    @property
    def grid_dims(self) -> tuple[int, int]:
        """Number of patch rows and columns."""

        width, height = self.source_dims
        return grid_shape(height, width, self.size, self.stride)

    def same_grid(self, other: PatchSet) -> bool:
        return (
            self.size == other.size
            and self.stride == other.stride
            and self.source_dims == other.source_dims
            and np.array_equal(self.coords, other.coords)
        )


def grid_shape(height: int, width: int, size: int, stride: int) -> tuple[int, int]:
    return (height - size) // stride + 1, (width - size) // stride + 1


def extract_patches(
    img: np.ndarray, size: int = DEFAULT_PATCH_SIZE, stride: int = DEFAULT_STRIDE
) -> PatchSet:
    """Cut a row-major grid of patches; trailing pixels that do not fit are dropped."""

    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise PatchGridError(f"patch extraction needs a 2-D plane, got shape {img.shape}")
    if stride < 1:
        raise PatchGridError("stride must be at least 1")
    height, width = img.shape
    if size < 1 or size > height or size > width:
        raise PatchGridError(f"image {width}x{height} is smaller than one {size}x{size} patch")

    windows = sliding_window_view(img, (size, size))[::stride, ::stride]
    rows, cols = windows.shape[:2]
    patches = windows.reshape(rows * cols, size, size).copy()
    grid_r, grid_c = np.meshgrid(np.arange(rows) * stride, np.arange(cols) * stride, indexing="ij")
    coords = np.stack([grid_r.ravel(), grid_c.ravel()], axis=1)
    return PatchSet(
        patches=patches,
        coords=coords,
        source_dims=(width, height),
        size=size,
        stride=stride,
    )


def patch_delta(ref: PatchSet, dist: PatchSet) -> np.ndarray:
    """Mean absolute luminance difference per patch."""

    if not ref.same_grid(dist):
        raise PatchGridError("reference and distorted patch grids do not match")
    return np.mean(np.abs(ref.patches - dist.patches), axis=(1, 2))

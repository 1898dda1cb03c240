"""Per-patch value grids (scores, noise, resistance) laid out like the source image."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from ..preprocess import grid_shape

NORMALIZATIONS = ("none", "max-one")


@dataclass(frozen=True)
class QualityMap:
    values: np.ndarray
    patch_size: int
    stride: int
    source_dims: tuple[int, int]
    normalization: str = "none"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        width, height = self.source_dims
        expected = grid_shape(height, width, self.patch_size, self.stride)
        if values.shape != expected:
            raise ValueError(
                f"map grid {values.shape} does not match {expected} for a {width}x{height} "
                f"source with {self.patch_size}px patches at stride {self.stride}"
            )

    @property
    def grid_dims(self) -> tuple[int, int]:
        return self.values.shape

    def normalized(self) -> QualityMap:
        """Scale so the maximum is one; an all-zero map is returned unchanged."""

        peak = float(np.max(self.values))
        if peak <= 0:
            return replace(self, normalization="max-one")
        return replace(self, values=self.values / peak, normalization="max-one")

    def to_dict(self) -> dict[str, Any]:
        return {
            "values": self.values.tolist(),
            "patch_size": self.patch_size,
            "stride": self.stride,
            "source_dims": list(self.source_dims),
            "normalization": self.normalization,
        }


def quality_map_from_dict(payload: dict[str, Any]) -> QualityMap:
    try:
        width, height = payload["source_dims"]
        return QualityMap(
            values=np.array(payload["values"], dtype=np.float64),
            patch_size=int(payload["patch_size"]),
            stride=int(payload["stride"]),
            source_dims=(int(width), int(height)),
            normalization=payload.get("normalization", "none"),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed quality map: {exc}") from exc

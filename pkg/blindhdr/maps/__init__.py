"""Quality maps, heatmaps, gratings and the synthetic scored dataset.

The resistance probe lives in :mod:`blindhdr.maps.probe`; it needs the model package.
"""

from .grating import grating_value, make_grating
from .heatmap import colormap, render_heatmap
from .quality_map import QualityMap, quality_map_from_dict
from .synth import distort, oracle_dmos, oracle_resistance, resistance_field, synth_dataset

__all__ = [
    "QualityMap",
    "colormap",
    "distort",
    "grating_value",
    "make_grating",
    "oracle_dmos",
    "oracle_resistance",
    "quality_map_from_dict",
    "render_heatmap",
    "resistance_field",
    "synth_dataset",
]

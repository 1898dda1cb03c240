from __future__ import annotations

from pathlib import Path
from typing import Any

from ..hdrio import read_image
from ..maps import render_heatmap
from ..maps.probe import probe_resistance, probe_scales
from ..utility.config import ConfigError, RunConfig
from ..utility.files import write_json
from .common import bundle_from, output_path


def cmd_probe(run: RunConfig) -> dict[str, Any]:
    """Error-resistance maps of an image, or of the grating at each ``--scale``."""

    bundle = bundle_from(run)
    if run.grating:
        maps = {
            f"t@{scale:g}": qmap
            for scale, qmap in probe_scales(
                bundle, run.scales, run.width, run.height, run.peak, run.stride
            ).items()
        }
    elif run.image:
        maps = {"t": probe_resistance(bundle, read_image(run.image), run.stride)}
    else:
        raise ConfigError("probe needs --image or --grating")

    target = write_json(
        output_path(run, "probe.json"),
        {"maps": {name: qmap.to_dict() for name, qmap in maps.items()}},
    )
    heatmaps = []
    if run.heatmaps:
        for name, qmap in maps.items():
            stem = name.replace("@", "_")
            heatmaps.append(str(render_heatmap(qmap, Path(run.heatmaps) / f"{stem}.ppm")))
    summary = {
        name: [float(qmap.values.min()), float(qmap.values.max())] for name, qmap in maps.items()
    }
    return {"probe": str(target), "t_range": summary, "heatmaps": heatmaps}

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..maps import quality_map_from_dict, render_heatmap
from ..utility.config import RunConfig
from .common import output_path, require


def cmd_heatmap(run: RunConfig) -> dict[str, Any]:
    """Re-render one map of a saved prediction or probe JSON."""

    require(run, "map_file")
    document = json.loads(Path(run.map_file).read_text(encoding="utf-8"))
    maps = document.get("maps") if isinstance(document, dict) else None
    if not isinstance(maps, dict):
        raise ValueError(f"{run.map_file} is not a prediction or probe map file")
    if run.which not in maps:
        raise ValueError(f"{run.map_file} holds no {run.which!r} map")
    qmap = quality_map_from_dict(maps[run.which])
    target = render_heatmap(qmap, output_path(run, f"{run.which}.ppm"))
    return {"heatmap": str(target), "grid": list(qmap.grid_dims)}

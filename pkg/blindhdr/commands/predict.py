from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from ..hdrio import read_image
from ..maps import render_heatmap
from ..model import predict_image
from ..utility.config import RunConfig
from ..utility.files import write_json
from .common import bundle_from, output_path, require

logger = logging.getLogger(__name__)


def cmd_predict(run: RunConfig) -> dict[str, Any]:
    """Score one image; write the score and its three maps as JSON, heatmaps optional."""

    require(run, "image")
    bundle = bundle_from(run)
    prediction = predict_image(bundle, read_image(run.image), stride=run.stride)
    maps = {
        "dmos": prediction.quality_map,
        "delta": prediction.delta_map,
        "t": prediction.t_map,
    }
    document = {
        "image": str(run.image),
        "score": prediction.score,
        "fingerprint": bundle.config.fingerprint(),
        "maps": {name: qmap.to_dict() for name, qmap in maps.items()},
    }
    target = write_json(output_path(run, "prediction.json"), document)

    heatmaps = []
    if run.heatmaps:
        for name, qmap in maps.items():
            heatmaps.append(str(render_heatmap(qmap, Path(run.heatmaps) / f"{name}.ppm")))
    logger.info("Predicted score %.4f for %s", prediction.score, run.image)
    return {"score": prediction.score, "prediction": str(target), "heatmaps": heatmaps}

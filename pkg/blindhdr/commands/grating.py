from __future__ import annotations

from typing import Any

from ..hdrio import write_image
from ..maps import make_grating
from ..utility.config import RunConfig
from .common import output_path


def cmd_grating(run: RunConfig) -> dict[str, Any]:
    image = make_grating(run.width, run.height, run.peak)
    target = output_path(run, "grating.pfm")
    write_image(image, target)
    return {"grating": str(target), "width": image.width, "height": image.height}

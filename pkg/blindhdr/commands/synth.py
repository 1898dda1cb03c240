from __future__ import annotations

from pathlib import Path
from typing import Any

from ..maps.synth import MANIFEST_NAME, synth_dataset
from ..utility.config import RunConfig
from .common import require


def cmd_synth(run: RunConfig) -> dict[str, Any]:
    """Generate the synthetic scored dataset and its manifest."""

    require(run, "out_dir")
    manifest = synth_dataset(
        run.out_dir,
        n_contents=run.contents,
        levels=run.levels,
        seed=run.seed,
        size=run.size,
        kinds=run.kinds,
        include_pristine=run.include_pristine,
        peak=run.peak,
    )
    return {
        "manifest": str(Path(run.out_dir) / MANIFEST_NAME),
        "images": len(manifest),
        "contents": len(manifest.content_ids()),
    }

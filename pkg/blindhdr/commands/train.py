from __future__ import annotations

import logging
from typing import Any

from ..hdrio import load_manifest
from ..model import TrainConfig, save_bundle, train_two_stage
from ..utility.config import RunConfig
from .common import describe_bundle, output_path, require

logger = logging.getLogger(__name__)


def cmd_train(run: RunConfig) -> dict[str, Any]:
    """Run both training stages and write the weight file."""

    require(run, "manifest")
    manifest = load_manifest(run.manifest)
    bundle = train_two_stage(manifest, TrainConfig.from_run_config(run), run.seed)
    target = save_bundle(bundle, output_path(run, "model.bhw"))
    return {
        "bundle": str(target),
        "seed": run.seed,
        "stage1_loss": bundle.history.get("stage1", []),
        "stage2_loss": bundle.history.get("stage2", []),
        **describe_bundle(bundle),
    }

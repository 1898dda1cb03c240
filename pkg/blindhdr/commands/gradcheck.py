from __future__ import annotations

import logging
from typing import Any

import numpy as np

from ..maps.synth import make_reference
from ..model import ModelBundle, chain_gradient_check
from ..model.inputs import prepare_inputs
from ..nn import NumericError
from ..utility.config import RunConfig
from ..utility.files import write_json
from .common import bundle_from, model_config, output_path

logger = logging.getLogger(__name__)

CHECK_BATCH = 2


def cmd_gradcheck(run: RunConfig) -> dict[str, Any]:
    """Finite-difference check of the full chain on a couple of synthetic patches.

    Uses ``--bundle`` when given, otherwise a freshly initialized model.
    """

    if run.bundle:
        bundle = bundle_from(run)
    else:
        bundle = ModelBundle.initialize(model_config(run), run.seed)
    rng = np.random.default_rng(run.seed)
    plane = make_reference(rng, size=bundle.config.patch_size * 2, peak=bundle.config.l_peak)
    inputs = prepare_inputs(plane, bundle.config, bundle.config.patch_size)
    if not run.bundle:
        bundle.pnet.calibrate(inputs.pnet)
    target = rng.uniform(0.05, 0.95, size=CHECK_BATCH)

    report = chain_gradient_check(
        bundle,
        inputs.enet[:CHECK_BATCH],
        inputs.pnet[:CHECK_BATCH],
        target,
        tolerance=run.tolerance,
        seed=run.seed,
    )
    written = write_json(output_path(run, "gradcheck.json"), report.to_dict())
    logger.info(
        "Worst relative error %.3g over %d tensors", report.worst, len(report.max_relative_error)
    )
    if not report.ok:
        raise NumericError(f"gradient check failed for {', '.join(report.flagged)}")
    return {"report": str(written), "worst": report.worst, "ok": report.ok}

from __future__ import annotations

from typing import Any

from ..evaluation import cross_dataset_eval, make_splits, model_trainer, run_evaluation
from ..hdrio import load_manifest
from ..model import TrainConfig
from ..utility.config import ConfigError, RunConfig
from ..utility.files import write_json
from .common import output_path


def cmd_eval(run: RunConfig) -> dict[str, Any]:
    """Split protocol on one manifest, or cross-dataset with train/test manifest groups."""

    trainer = model_trainer(TrainConfig.from_run_config(run))
    if run.train_manifests or run.test_manifests:
        if not (run.train_manifests and run.test_manifests):
            raise ConfigError("cross-dataset eval needs --train-manifest and --test-manifest")
        report = cross_dataset_eval(
            trainer,
            [load_manifest(path) for path in run.train_manifests],
            [load_manifest(path) for path in run.test_manifests],
            cycles=run.cycles,
            seed=run.seed,
        )
    elif run.manifest:
        manifest = load_manifest(run.manifest)
        splits = make_splits(manifest, run.train_fraction, run.iterations, run.seed)
        report = run_evaluation(trainer, manifest, splits, seed=run.seed, threads=run.threads)
    else:
        raise ConfigError("eval needs --manifest or --train-manifest/--test-manifest")

    print(report.format_table())
    target = write_json(output_path(run, "metrics.json"), report.to_dict())
    return {"report": str(target), **report.to_dict()["medians"]}

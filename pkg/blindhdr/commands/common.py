"""Helpers shared by the command implementations."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from ..model import ModelBundle, ModelConfig, load_bundle
from ..utility.config import ConfigError, RunConfig

logger = logging.getLogger(__name__)


def require(run: RunConfig, *names: str) -> None:
    """Raise a usage error naming the first missing option."""

    for name in names:
        value = getattr(run, name)
        if value is None or value == []:
            flag = "--" + name.replace("_", "-")
            raise ConfigError(f"{run.command} needs {flag}")


def bundle_from(run: RunConfig) -> ModelBundle:
    require(run, "bundle")
    return load_bundle(run.bundle)


def model_config(run: RunConfig) -> ModelConfig:
    return ModelConfig.from_run_config(run)


def output_path(run: RunConfig, default_name: str) -> Path:
    """The ``--out`` path, or ``default_name`` inside ``--out-dir`` (or the working dir)."""

    if run.out:
        return Path(run.out)
    return Path(run.out_dir or ".") / default_name


def describe_bundle(bundle: ModelBundle) -> dict[str, Any]:
    return {
        "fingerprint": bundle.config.fingerprint(),
        "k": bundle.k,
        "config": bundle.config.to_dict(),
    }

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from blindhdr.hdrio import DatasetManifest
from blindhdr.maps import synth_dataset
from blindhdr.model import ModelBundle, ModelConfig
from blindhdr.utility import config as config_module


@pytest.fixture(autouse=True)
def configure_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("BLINDHDR_LOG_LEVEL", "WARNING")
    monkeypatch.setenv("BLINDHDR_SEED", "0")
    monkeypatch.setenv("BLINDHDR_THREADS", "1")
    monkeypatch.delenv("BLINDHDR_L_PEAK", raising=False)
    monkeypatch.delenv("BLINDHDR_D_SCALE", raising=False)
    monkeypatch.delenv("BLINDHDR_PREPROCESS", raising=False)
    config_module.reset_config_cache()
    yield
    config_module.reset_config_cache()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def dataset_dir(tmp_path: Path) -> Path:
    return tmp_path / "synth"


@pytest.fixture
def small_manifest(dataset_dir: Path) -> DatasetManifest:
    """Three 64x64 contents with two levels of two distortion kinds each."""

    return synth_dataset(dataset_dir, n_contents=3, levels=2, seed=0, size=64)


@pytest.fixture
def tanh_bundle() -> ModelBundle:
    return ModelBundle.initialize(ModelConfig(activation="tanh"), seed=7)

"""Architecture and training settings for the two networks."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from ..preprocess import input_peak
from ..utility.config import ACTIVATIONS, PREPROCESS_MODES, ConfigError, RunConfig


@dataclass(frozen=True)
class ModelConfig:
    """Everything that shapes the weights or the meaning of their inputs and outputs."""

    patch_size: int = 32
    l_peak: float = 4000.0
    d_scale: float = 100.0
    dropout: float = 0.25
    activation: str = "relu"
    pnet_no_pool: bool = False
    preprocess: str = "linear"

    def __post_init__(self) -> None:
        if self.patch_size != 32:
            raise ConfigError("the network layout is fixed to 32x32 patches")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.preprocess not in PREPROCESS_MODES:
            raise ConfigError(f"unknown preprocessing mode {self.preprocess!r}")
        if self.l_peak <= 0 or self.d_scale <= 0:
            raise ConfigError("L_peak and D_scale must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout rate must lie in [0, 1)")

    @property
    def input_peak(self) -> float:
        return input_peak(self.preprocess, self.l_peak)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> ModelConfig:
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise ConfigError(f"unknown model config keys: {', '.join(unknown)}")
        return cls(**payload)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON form; differs for any architecture change."""

        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_run_config(cls, run: RunConfig) -> ModelConfig:
        return cls(
            l_peak=run.l_peak,
            d_scale=run.d_scale,
            dropout=run.dropout,
            activation=run.activation,
            pnet_no_pool=run.no_pool,
            preprocess=run.preprocess,
        )


@dataclass(frozen=True)
class TrainConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    epochs_stage1: int = 10
    epochs_stage2: int = 20
    batch_size: int = 64
    stride: int = 32
    learning_rate: float = 0.001
    threads: int = 1

    def __post_init__(self) -> None:
        if self.epochs_stage1 < 0 or self.epochs_stage2 < 0:
            raise ConfigError("epoch counts must be non-negative")
        if self.batch_size < 1 or self.stride < 1 or self.threads < 1:
            raise ConfigError("batch size, stride and threads must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")

    @classmethod
    def from_run_config(cls, run: RunConfig) -> TrainConfig:
        return cls(
            model=ModelConfig.from_run_config(run),
            epochs_stage1=run.epochs_stage1,
            epochs_stage2=run.epochs_stage2,
            batch_size=run.batch_size,
            stride=run.stride,
            learning_rate=run.learning_rate,
            threads=run.threads,
        )

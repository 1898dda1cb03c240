"""Configuration helpers for the quality toolkit."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

load_dotenv()

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_SEED = 0
DEFAULT_THREADS = 1
DEFAULT_L_PEAK = 4000.0
DEFAULT_D_SCALE = 100.0
DEFAULT_PREPROCESS = "linear"

PREPROCESS_MODES = ("linear", "pu", "drago", "reinhard02", "reinhard05")
ACTIVATIONS = ("relu", "tanh")
MAP_KINDS = ("dmos", "delta", "t")


class ConfigError(ValueError):
    """Raised when a configuration file or flag value cannot be used."""


@dataclass
class Config:
    """Runtime defaults derived from environment variables."""

    log_level: str = DEFAULT_LOG_LEVEL
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS
    l_peak: float = DEFAULT_L_PEAK
    d_scale: float = DEFAULT_D_SCALE
    preprocess: str = DEFAULT_PREPROCESS


def _env_int(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except ValueError:
        return default


def _env_float(name: str, default: float) -> float:
    try:
        return float(os.getenv(name, str(default)))
    except ValueError:
        return default


@lru_cache(maxsize=1)
def get_config() -> Config:
    """Load configuration from the environment (cached)."""

    preprocess = os.getenv("BLINDHDR_PREPROCESS", DEFAULT_PREPROCESS)
    if preprocess not in PREPROCESS_MODES:
        preprocess = DEFAULT_PREPROCESS

    return Config(
        log_level=os.getenv("BLINDHDR_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper(),
        seed=_env_int("BLINDHDR_SEED", DEFAULT_SEED),
        threads=max(1, _env_int("BLINDHDR_THREADS", DEFAULT_THREADS)),
        l_peak=_env_float("BLINDHDR_L_PEAK", DEFAULT_L_PEAK),
        d_scale=_env_float("BLINDHDR_D_SCALE", DEFAULT_D_SCALE),
        preprocess=preprocess,
    )


def reset_config_cache() -> None:
    """Clear the cached configuration (useful for tests)."""

    get_config.cache_clear()


@dataclass
class RunConfig:
    """Fully resolved options for one CLI command."""

    command: str = ""
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS

    # paths
    manifest: str | None = None
    out: str | None = None
    out_dir: str | None = None
    bundle: str | None = None
    image: str | None = None
    map_file: str | None = None
    heatmaps: str | None = None
    train_manifests: list[str] = field(default_factory=list)
    test_manifests: list[str] = field(default_factory=list)

    # model and training
    epochs_stage1: int = 10
    epochs_stage2: int = 20
    batch_size: int = 64
    stride: int = 32
    l_peak: float = DEFAULT_L_PEAK
    d_scale: float = DEFAULT_D_SCALE
    dropout: float = 0.25
    learning_rate: float = 0.001
    no_pool: bool = False
    preprocess: str = DEFAULT_PREPROCESS
    activation: str = "relu"

    # evaluation
    iterations: int = 10
    train_fraction: float = 0.8
    cycles: int = 3

    # synthesis, gratings and maps
    contents: int = 8
    levels: int = 4
    size: int = 128
    kinds: list[str] = field(default_factory=lambda: ["quantization", "blur"])
    include_pristine: bool = True
    width: int = 800
    height: int = 800
    peak: float = DEFAULT_L_PEAK
    grating: bool = False
    scales: list[float] = field(default_factory=lambda: [1.0])
    which: str = "dmos"
    tolerance: float = 1e-4

    def validate(self) -> None:
        if self.preprocess not in PREPROCESS_MODES:
            raise ConfigError(
                f"preprocess must be one of {', '.join(PREPROCESS_MODES)}, got {self.preprocess!r}"
            )
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"activation must be one of {', '.join(ACTIVATIONS)}")
        if self.which not in MAP_KINDS:
            raise ConfigError(f"map kind must be one of {', '.join(MAP_KINDS)}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout rate must lie in [0, 1)")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train fraction must lie in (0, 1)")
        if self.threads < 1 or self.batch_size < 1 or self.stride < 1:
            raise ConfigError("threads, batch size and stride must be positive")
        if self.l_peak <= 0 or self.d_scale <= 0:
            raise ConfigError("L_peak and D_scale must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _read_config_file(path: str | Path) -> dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")

    known = {item.name for item in fields(RunConfig)}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return payload


def resolve_run_config(
    command: str,
    overrides: dict[str, Any],
    config_file: str | Path | None = None,
) -> RunConfig:
    """Merge environment defaults, an optional JSON file and explicit flags."""

    env = get_config()
    resolved = RunConfig(
        command=command,
        seed=env.seed,
        threads=env.threads,
        l_peak=env.l_peak,
        d_scale=env.d_scale,
        preprocess=env.preprocess,
    )

    layers: list[dict[str, Any]] = []
    if config_file is not None:
        layers.append(_read_config_file(config_file))
    layers.append({key: value for key, value in overrides.items() if value is not None})

    known = {item.name for item in fields(RunConfig)}
    for layer in layers:
        for key, value in layer.items():
            if key in known and key != "command":
                setattr(resolved, key, value)

    resolved.validate()
    return resolved

"""The complete set of trained quantities: both networks plus the mixing gain."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn import LayerParams, Parameter
from .config import ModelConfig
from .enet import ENet
from .mixing import gain, kappa_for_gain
from .pnet import PNet

INITIAL_GAIN = 1.0


def seeded_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for one consumer (init, shuffling, dropout) of a run seed."""

    return np.random.default_rng(np.random.SeedSequence([seed, stream]))


@dataclass
class ModelBundle:
    config: ModelConfig
    enet: ENet
    pnet: PNet
    kappa: Parameter
    history: dict[str, list[float]] = field(default_factory=dict, compare=False)

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int = 0) -> ModelBundle:
        rng = seeded_rng(seed, 0)
        return cls(
            config=config,
            enet=ENet(config, rng),
            pnet=PNet(config, rng),
            kappa=Parameter("mix.kappa", kappa_for_gain(INITIAL_GAIN)),
        )

    @property
    def k(self) -> float:
        return gain(float(self.kappa.value))

    def tensors(self) -> LayerParams:
        """All parameters in serialization order."""

        return LayerParams([*self.enet.params, *self.pnet.params, self.kappa])

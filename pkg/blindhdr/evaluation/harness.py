"""Median-of-iterations evaluation and the cross-dataset protocol."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ..hdrio import DatasetManifest, ManifestEntry, ManifestError, read_image
from ..model import ModelBundle, TrainConfig, predict_image, train_two_stage
from .metrics import all_metrics
from .splits import Split

logger = logging.getLogger(__name__)

METRICS = ("srcc", "krcc", "plcc", "rmse")

Predictor = Callable[[ManifestEntry], float]
Trainer = Callable[[DatasetManifest, int], Predictor]


class EvaluationError(RuntimeError):
    """A split or cycle failed; ``index`` says which, the cause is chained."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass
class MetricsReport:
    srcc: float
    krcc: float
    plcc: float
    rmse: float
    n_iterations: int
    per_iteration: dict[str, list[float]]
    protocol: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_iterations(
        cls, results: Sequence[dict[str, float]], protocol: dict[str, Any]
    ) -> MetricsReport:
        per_iteration = {name: [result[name] for result in results] for name in METRICS}
        medians = {name: float(np.median(values)) for name, values in per_iteration.items()}
        return cls(
            **medians,
            n_iterations=len(results),
            per_iteration=per_iteration,
            protocol=dict(protocol),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "medians": {name: getattr(self, name) for name in METRICS},
            "n_iterations": self.n_iterations,
            "per_iteration": self.per_iteration,
            "protocol": self.protocol,
        }

    def format_table(self) -> str:
        header = "".join(f"{name.upper():>10}" for name in METRICS)
        row = "".join(f"{getattr(self, name):>10.4f}" for name in METRICS)
        return f"{header}\n{row}\n(median of {self.n_iterations} iterations)"


def _child_seeds(seed: int, count: int) -> list[int]:
    return [
        int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)
    ]


def _score(trainer: Trainer, train: DatasetManifest, test: DatasetManifest, seed: int):
    predictor = trainer(train, seed)
    predicted = [predictor(entry) for entry in test.entries]
    actual = [entry.dmos for entry in test.entries]
    return all_metrics(predicted, actual)


def run_evaluation(
    trainer: Trainer,
    manifest: DatasetManifest,
    splits: Sequence[Split],
    seed: int = 0,
    threads: int = 1,
) -> MetricsReport:
    """Train on each split's train side, score its test side, and report medians."""

    seeds = _child_seeds(seed, len(splits))

    def evaluate(index: int) -> dict[str, float]:
        split = splits[index]
        try:
            result = _score(
                trainer, manifest.subset(split.train), manifest.subset(split.test), seeds[index]
            )
        except Exception as exc:
            raise EvaluationError(f"split {index} failed: {exc}", index) from exc
        logger.info(
            "Split %d/%d: SRCC %.4f PLCC %.4f",
            index + 1,
            len(splits),
            result["srcc"],
            result["plcc"],
        )
        return result

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(evaluate, range(len(splits))))
    return MetricsReport.from_iterations(
        results,
        {"protocol": "splits", "iterations": len(splits), "seed": seed, "images": len(manifest)},
    )


def cross_dataset_eval(
    trainer: Trainer,
    train_manifests: Sequence[DatasetManifest],
    test_manifests: Sequence[DatasetManifest],
    cycles: int = 3,
    seed: int = 0,
) -> MetricsReport:
    """Train on the union of one group of datasets and test on another, ``cycles`` times."""

    train = DatasetManifest.union(train_manifests)
    test = DatasetManifest.union(test_manifests)
    shared = {entry.distorted_path for entry in train.entries} & {
        entry.distorted_path for entry in test.entries
    }
    if shared:
        raise ManifestError(f"{len(shared)} distorted images appear in both train and test sets")

    results = []
    for cycle, cycle_seed in enumerate(_child_seeds(seed, cycles)):
        try:
            results.append(_score(trainer, train, test, cycle_seed))
        except Exception as exc:
            raise EvaluationError(f"cycle {cycle} failed: {exc}", cycle) from exc
        logger.info("Cycle %d/%d: SRCC %.4f", cycle + 1, cycles, results[-1]["srcc"])
    return MetricsReport.from_iterations(
        results,
        {
            "protocol": "cross-dataset",
            "cycles": cycles,
            "seed": seed,
            "train_images": len(train),
            "test_images": len(test),
        },
    )


def model_trainer(cfg: TrainConfig) -> Trainer:
    """Adapt two-stage training to the ``trainer(manifest, seed) -> predictor`` shape."""

    def trainer(manifest: DatasetManifest, seed: int) -> Predictor:
        bundle = train_two_stage(manifest, cfg, seed)
        return bundle_predictor(bundle, cfg.stride, cfg.batch_size)

    return trainer


def bundle_predictor(bundle: ModelBundle, stride: int = 32, batch_size: int = 64) -> Predictor:
    def predict(entry: ManifestEntry) -> float:
        return predict_image(bundle, read_image(entry.distorted_path), stride, batch_size).score

    return predict


def oracle_trainer(noise: float = 0.0) -> Trainer:
    """A trainer that knows the answers; ``noise`` adds seeded Gaussian error."""

    def trainer(manifest: DatasetManifest, seed: int) -> Predictor:
        rng = np.random.default_rng(seed)

        def predict(entry: ManifestEntry) -> float:
            return entry.dmos + (float(rng.normal(0.0, noise)) if noise > 0 else 0.0)

        return predict

    return trainer

"""Content-disjoint train/test splits."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..hdrio import DatasetManifest


class Split(NamedTuple):
    train: tuple[str, ...]
    test: tuple[str, ...]


def split_sizes(n_contents: int, train_fraction: float) -> tuple[int, int]:
    if n_contents < 2:
        raise ValueError(f"need at least 2 distinct contents to split, got {n_contents}")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train fraction must lie in (0, 1)")
    n_train = min(max(round(train_fraction * n_contents), 1), n_contents - 1)
    return n_train, n_contents - n_train


def make_splits(
    manifest: DatasetManifest,
    train_fraction: float = 0.8,
    iterations: int = 1000,
    seed: int = 0,
) -> list[Split]:
    """Random partitions of the content ids; every distortion of a reference stays together.

    Each iteration draws from its own child of ``SeedSequence(seed)``.
    """

    if iterations < 1:
        raise ValueError("need at least one iteration")
    contents = manifest.content_ids()
    n_train, _ = split_sizes(len(contents), train_fraction)
    splits = []
    for child in np.random.SeedSequence(seed).spawn(iterations):
        order = np.random.default_rng(child).permutation(len(contents))
        train = tuple(sorted(contents[i] for i in order[:n_train]))
        test = tuple(sorted(contents[i] for i in order[n_train:]))
        splits.append(Split(train=train, test=test))
    return splits

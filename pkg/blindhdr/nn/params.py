"""Trainable parameters with their optimizer state."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np


class NumericError(ArithmeticError):
    """Raised when a tensor or gradient stops being finite."""


class ShapeError(ValueError):
    """Raised when tensor shapes do not fit an operation."""


def ensure_finite(name: str, array: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(array)):
        raise NumericError(f"non-finite values in {name}")
    return array


@dataclass(eq=False)
class Parameter:
    """A parameter tensor plus gradient, Adam moments, step count and trainable flag."""

    name: str
    value: np.ndarray
    trainable: bool = True
    grad: np.ndarray = field(init=False, repr=False)
    first_moment: np.ndarray = field(init=False, repr=False)
    second_moment: np.ndarray = field(init=False, repr=False)
    step: int = 0

    def __post_init__(self) -> None:
        self.value = np.array(self.value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.first_moment = np.zeros_like(self.value)
        self.second_moment = np.zeros_like(self.value)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def zero_grad(self) -> None:
        self.grad.fill(0.0)


class LayerParams:
    """Ordered, named collection of parameters belonging to one network."""

    def __init__(self, parameters: Iterable[Parameter] = ()):
        self._params: dict[str, Parameter] = {}
        for parameter in parameters:
            self.add(parameter)

    def add(self, parameter: Parameter) -> None:
        if parameter.name in self._params:
            raise ValueError(f"duplicate parameter name {parameter.name}")
        self._params[parameter.name] = parameter

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: object) -> bool:
        return name in self._params

    def names(self) -> list[str]:
        return list(self._params)

    def trainable(self) -> list[Parameter]:
        return [parameter for parameter in self if parameter.trainable]

    def freeze(self) -> None:
        for parameter in self:
            parameter.trainable = False

    def zero_grad(self) -> None:
        for parameter in self:
            parameter.zero_grad()

    def digest(self) -> str:
        """SHA-256 over names, shapes and values; changes iff any value changes."""

        sha = hashlib.sha256()
        for parameter in self:
            sha.update(parameter.name.encode("utf-8"))
            sha.update(repr(parameter.shape).encode("ascii"))
            sha.update(np.ascontiguousarray(parameter.value, dtype="<f8").tobytes())
        return sha.hexdigest()

"""Central finite-difference checks of analytic gradients."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol

import numpy as np

from .params import Parameter

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-4
DEFAULT_MAX_ENTRIES = 32
RELATIVE_FLOOR = 1e-6


class Differentiable(Protocol):
    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray: ...

    def backward(self, grad: np.ndarray, need_input_grad: bool = True) -> np.ndarray | None: ...


@dataclass
class GradientCheckReport:
    tolerance: float
    max_relative_error: dict[str, float] = field(default_factory=dict)
    entries_checked: dict[str, int] = field(default_factory=dict)

    @property
    def flagged(self) -> list[str]:
        return [
            name for name, error in self.max_relative_error.items() if error > self.tolerance
        ]

    @property
    def ok(self) -> bool:
        return not self.flagged

    @property
    def worst(self) -> float:
        return max(self.max_relative_error.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "ok": self.ok,
            "flagged": self.flagged,
            "max_relative_error": dict(self.max_relative_error),
            "entries_checked": dict(self.entries_checked),
        }


def step_size(theta: float) -> float:
    return max(1e-5, 1e-7 * abs(theta))


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), RELATIVE_FLOOR)


def _sample_indices(size: int, max_entries: int, rng: np.random.Generator) -> np.ndarray:
    if size <= max_entries:
        return np.arange(size)
    return np.sort(rng.choice(size, size=max_entries, replace=False))


def _central_difference(
    objective: Callable[[], float], flat: np.ndarray, index: int, h: float
) -> float:
    original = flat[index]
    flat[index] = original + h
    upper = objective()
    flat[index] = original - h
    lower = objective()
    flat[index] = original
    return (upper - lower) / (2.0 * h)


def gradient_check(
    objective: Callable[[], float],
    analytic: Callable[[], None],
    params: Iterable[Parameter],
    tolerance: float = DEFAULT_TOLERANCE,
    max_entries: int = DEFAULT_MAX_ENTRIES,
    rng: np.random.Generator | None = None,
) -> GradientCheckReport:
    """Compare accumulated ``Parameter.grad`` against central differences of ``objective``.

    ``analytic`` must run forward and backward so that every listed parameter holds its
    gradient; ``objective`` must recompute the scalar from the current parameter values.
    Entries above tolerance are retried once with a ten times smaller step, so a
    difference that straddles a ReLU or max-pool kink is not reported.
    """

    params = list(params)
    rng = rng or np.random.default_rng(0)
    for parameter in params:
        parameter.zero_grad()
    analytic()
    gradients = {parameter.name: parameter.grad.copy() for parameter in params}

    report = GradientCheckReport(tolerance=tolerance)
    for parameter in params:
        flat = parameter.value.reshape(-1)
        grad = gradients[parameter.name].reshape(-1)
        worst = 0.0
        indices = _sample_indices(flat.size, max_entries, rng)
        for index in indices:
            h = step_size(float(flat[index]))
            error = relative_error(grad[index], _central_difference(objective, flat, index, h))
            if error > tolerance:
                retry = relative_error(
                    grad[index], _central_difference(objective, flat, index, h / 10.0)
                )
                logger.debug(
                    "Retried %s[%d] at h/10: %.3g -> %.3g", parameter.name, index, error, retry
                )
                error = min(error, retry)
            worst = max(worst, error)
        report.max_relative_error[parameter.name] = worst
        report.entries_checked[parameter.name] = int(indices.size)
        if worst > tolerance:
            logger.warning(
                "Gradient mismatch for %s: relative error %.3g > %.3g",
                parameter.name,
                worst,
                tolerance,
            )
    return report


def check_layer(
    layer: Differentiable,
    x: np.ndarray,
    params: Iterable[Parameter] = (),
    tolerance: float = DEFAULT_TOLERANCE,
    max_entries: int = DEFAULT_MAX_ENTRIES,
    seed: int = 0,
) -> GradientCheckReport:
    """Check a layer or stack on input ``x``, including the gradient w.r.t. the input.

    The scalar objective is a fixed random projection of the output. Forward passes run
    in inference mode, so dropout is disabled.
    """

    rng = np.random.default_rng(seed)
    source = Parameter("input", np.array(x, dtype=np.float64, copy=True))
    projection = rng.standard_normal(layer.forward(source.value).shape)

    def objective() -> float:
        return float(np.sum(layer.forward(source.value) * projection))

    def analytic() -> None:
        layer.forward(source.value)
        source.grad[...] = layer.backward(projection, need_input_grad=True)

    return gradient_check(
        objective,
        analytic,
        [*params, source],
        tolerance=tolerance,
        max_entries=max_entries,
        rng=rng,
    )

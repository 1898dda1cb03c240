"""Perceptually uniform (PU) luminance encoding driven by a knot table."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..utility.files import atomic_write

logger = logging.getLogger(__name__)

# Joint rod-cone sensitivity parameters (peak, sensitivity drop, transition slope, low slope).
CSF_SA = (30.162, 4.0627, 1.6596, 0.2712)
LOG_L_MIN = -5.0
LOG_L_MAX = 10.0
REQUIRED_LOG_COVERAGE = (-5.0, 4.0)
# Curve values at the ends of the sRGB-like range, used to map it near [0, 255].
PU_LOW = 31.9270
PU_HIGH = 149.9244


class CurveError(ValueError):
    """Raised for PU knot tables that are too short, non-monotone or under-covering."""


@dataclass(frozen=True)
class PuCurve:
    """Monotone knot table of ``(log10 luminance, PU value)`` pairs."""

    log_luminance: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        log_l = np.asarray(self.log_luminance, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if log_l.ndim != 1 or log_l.shape != values.shape:
            raise CurveError("knot columns must be one-dimensional and equally long")
        if log_l.size < 2:
            raise CurveError("a PU curve needs at least 2 knots")
        if np.any(np.diff(log_l) <= 0) or np.any(np.diff(values) <= 0):
            raise CurveError("PU knots must be strictly increasing in both coordinates")
        low, high = REQUIRED_LOG_COVERAGE
        if log_l[0] > low or log_l[-1] < high:
            raise CurveError(
                f"PU curve covers [1e{log_l[0]:g}, 1e{log_l[-1]:g}] cd/m², "
                f"needs at least [1e{low:g}, 1e{high:g}]"
            )
        object.__setattr__(self, "log_luminance", log_l)
        object.__setattr__(self, "values", values)


def _joint_rod_cone_sensitivity(lum: np.ndarray) -> np.ndarray:
    peak, drop, transition, low_slope = CSF_SA
    return peak * np.power(np.power(drop / lum, transition) + 1.0, -low_slope)


@lru_cache(maxsize=4)
def default_pu_curve(knots: int = 256) -> PuCurve:
    """Build the default curve by integrating contrast sensitivity over log-luminance."""

    log_l = np.linspace(LOG_L_MIN, LOG_L_MAX, knots)
    sensitivity = _joint_rod_cone_sensitivity(np.power(10.0, log_l))
    # Integration in the log domain picks up the ln(10) Jacobian.
    jnd = cumulative_trapezoid(sensitivity * np.log(10.0), log_l, initial=0.0)
    values = 255.0 * (jnd - PU_LOW) / (PU_HIGH - PU_LOW)
    return PuCurve(log_luminance=log_l, values=values)


def load_pu_curve(path: str | Path) -> PuCurve:
    """Read a two-column ``log10_luminance pu_value`` text file."""

    rows: list[tuple[float, float]] = []
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise CurveError(f"{path}:{number}: expected two columns")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise CurveError(f"{path}:{number}: non-numeric knot") from exc
    if len(rows) < 2:
        raise CurveError("a PU curve needs at least 2 knots")
    table = np.array(rows)
    return PuCurve(log_luminance=table[:, 0], values=table[:, 1])


def save_pu_curve(curve: PuCurve, path: str | Path) -> None:
    lines = [
        f"{log_l!r} {value!r}"
        for log_l, value in zip(curve.log_luminance.tolist(), curve.values.tolist())
    ]
    text = "\n".join(lines) + "\n"
    atomic_write(path, lambda tmp: tmp.write_text(text, encoding="utf-8"))


def pu_encode(lum: np.ndarray, curve: PuCurve | None = None) -> np.ndarray:
    """Map luminance to PU units by linear interpolation in (log10 L, PU) knot space.

    Luminance outside the curve's coverage is clamped to the end knots.
    """

    curve = curve or default_pu_curve()
    lum = np.asarray(lum, dtype=np.float64)
    floor = np.power(10.0, curve.log_luminance[0])
    log_l = np.log10(np.maximum(lum, floor))
    return np.interp(log_l, curve.log_luminance, curve.values)

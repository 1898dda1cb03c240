"""Procedural HDR dataset whose quality scores come from a known closed form.

Each reference mixes a chirped grating, a smooth ramp and band-limited noise in the
log-luminance domain. Each distorted image's score is
``100 * mean(tanh(K_STAR * delta / T*))`` over its patches, with ``delta`` the
per-patch mean absolute error and ``T*`` a fixed function of the reference patch's
mean local variance and mean luminance.

Quantization picks its step per patch in proportion to ``T*``, the way a masking-aware
encoder spends its error budget, so every patch of an image sits at about the same
``delta / T*`` and carries the image's score.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import gaussian_filter

from ..hdrio import DatasetManifest, HdrImage, ManifestEntry, save_manifest, write_pfm
from ..preprocess import extract_patches, patch_delta, variance_map
from ..preprocess.patches import DEFAULT_PATCH_SIZE

logger = logging.getLogger(__name__)

PEAK = 4000.0
K_STAR = 2.0
T_BASE = 20.0
SIGMA_REF = 100.0
LUMINANCE_KNEE = 200.0
KNEE_EXPONENT = 0.5
DMOS_RANGE = (0.0, 100.0)
MANIFEST_NAME = "manifest.json"
DCT_BLOCK = 8

# Index 0 is the identity. Quantization severities are steps at T* == T_BASE; they
# double per level, so every coarser grid is a subset of the finer one and the
# per-pixel error cannot shrink.
SEVERITIES: dict[str, tuple[float, ...]] = {
    "quantization": (0.0, 6.0, 12.0, 24.0, 48.0, 96.0),
    "blur": (0.0, 0.6, 1.2, 2.4, 4.8, 9.6),
    "blockdct": (0.0, 2.0, 6.0, 18.0, 54.0, 162.0),
}
DEFAULT_KINDS = ("quantization", "blur")
MAX_LEVELS = len(SEVERITIES["blur"]) - 1


def oracle_resistance(patches: np.ndarray) -> np.ndarray:
    """T* per ``(N, S, S)`` reference patch: rises with local contrast, falls above the knee."""

    patches = np.asarray(patches, dtype=np.float64)
    mean = patches.mean(axis=(1, 2))
    contrast = np.sqrt(np.array([variance_map(patch).mean() for patch in patches]))
    brightness = np.power(LUMINANCE_KNEE / np.maximum(mean, LUMINANCE_KNEE), KNEE_EXPONENT)
    return T_BASE * (1.0 + contrast / SIGMA_REF) * brightness


def resistance_field(reference: np.ndarray, patch_size: int = DEFAULT_PATCH_SIZE) -> np.ndarray:
    """Per-pixel T* of the patch tiling; leftover rows and columns take the edge patch's value."""

    reference = np.asarray(reference, dtype=np.float64)
    if reference.ndim != 2:
        raise ValueError(f"resistance field needs a 2-D plane, got shape {reference.shape}")
    height, width = reference.shape
    size = min(patch_size, height, width)
    grid = extract_patches(reference, size, size)
    rows, cols = grid.grid_dims
    t_star = oracle_resistance(grid.patches).reshape(rows, cols)
    row_index = np.minimum(np.arange(height) // size, rows - 1)
    col_index = np.minimum(np.arange(width) // size, cols - 1)
    return t_star[np.ix_(row_index, col_index)]


def oracle_dmos(
    reference: np.ndarray,
    distorted: np.ndarray,
    k_star: float = K_STAR,
    patch_size: int = 32,
    stride: int = 32,
) -> float:
    ref_patches = extract_patches(reference, patch_size, stride)
    delta = patch_delta(ref_patches, extract_patches(distorted, patch_size, stride))
    t_star = oracle_resistance(ref_patches.patches)
    return float(DMOS_RANGE[1] * np.mean(np.tanh(k_star * delta / t_star)))


def make_reference(rng: np.random.Generator, size: int = 128, peak: float = PEAK) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size] / max(size - 1, 1)

    theta = rng.uniform(0.0, np.pi)
    along = xx * np.cos(theta) + yy * np.sin(theta)
    f_start, f_end = rng.uniform(1.0, 4.0), rng.uniform(8.0, 24.0)
    phase = f_start * along + 0.5 * (f_end - f_start) * along**2
    grating = np.sin(2.0 * np.pi * phase + rng.uniform(0.0, 2.0 * np.pi))

    phi = rng.uniform(0.0, 2.0 * np.pi)
    ramp = 2.0 * (xx * np.cos(phi) + yy * np.sin(phi)) - 1.0

    noise = gaussian_filter(rng.standard_normal((size, size)), rng.uniform(1.5, 6.0), mode="wrap")
    noise /= max(float(noise.std()), 1e-12)

    weights = rng.dirichlet(np.ones(3))
    mixture = weights[0] * grating + weights[1] * ramp + weights[2] * noise
    low, high = float(mixture.min()), float(mixture.max())
    unit = (mixture - low) / (high - low) if high > low else np.ones_like(mixture)
    decades = rng.uniform(2.0, 4.0)
    return peak * np.power(10.0, decades * (unit - 1.0))


def _block_dct(lum: np.ndarray, step: float) -> np.ndarray:
    height, width = lum.shape
    rows, cols = height // DCT_BLOCK, width // DCT_BLOCK
    out = lum.copy()
    if rows == 0 or cols == 0:
        return out
    region = lum[: rows * DCT_BLOCK, : cols * DCT_BLOCK]
    blocks = region.reshape(rows, DCT_BLOCK, cols, DCT_BLOCK).transpose(0, 2, 1, 3)
    coeffs = dctn(blocks, axes=(-2, -1), norm="ortho")
    u, v = np.indices((DCT_BLOCK, DCT_BLOCK))
    table = step * (1.0 + u + v)
    restored = idctn(table * np.rint(coeffs / table), axes=(-2, -1), norm="ortho")
    out[: rows * DCT_BLOCK, : cols * DCT_BLOCK] = restored.transpose(0, 2, 1, 3).reshape(
        rows * DCT_BLOCK, cols * DCT_BLOCK
    )
    return np.maximum(out, 0.0)


def distort(lum: np.ndarray, kind: str, severity: float) -> np.ndarray:
    """Apply one distortion to a reference plane; severity 0 is the identity."""

    lum = np.asarray(lum, dtype=np.float64)
    if kind not in SEVERITIES:
        raise ValueError(f"unknown distortion kind {kind!r}")
    if severity == 0:
        return lum.copy()
    if kind == "quantization":
        step = severity * resistance_field(lum) / T_BASE
        return step * np.rint(lum / step)
    if kind == "blur":
        return gaussian_filter(lum, severity, mode="reflect")
    return _block_dct(lum, severity)


def _as_stored(lum: np.ndarray) -> np.ndarray:
    """Round through float32 so scores match what is read back from the PFM files."""

    return lum.astype(np.float32).astype(np.float64)


def synth_dataset(
    out_dir: str | Path,
    n_contents: int = 8,
    levels: int = 4,
    seed: int = 0,
    size: int = 128,
    kinds: Sequence[str] = DEFAULT_KINDS,
    include_pristine: bool = True,
    peak: float = PEAK,
) -> DatasetManifest:
    """Write references, distortions and ``manifest.json`` to ``out_dir``."""

    if n_contents < 1:
        raise ValueError("need at least one content")
    if not 1 <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must lie in [1, {MAX_LEVELS}]")
    unknown = [kind for kind in kinds if kind not in SEVERITIES]
    if unknown or not kinds:
        raise ValueError(f"distortion kinds must come from {', '.join(SEVERITIES)}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = out.resolve().name or "synth"
    entries: list[ManifestEntry] = []
    for index, child in enumerate(np.random.SeedSequence(seed).spawn(n_contents)):
        content = f"{prefix}-c{index:02d}"
        reference = _as_stored(make_reference(np.random.default_rng(child), size, peak))
        ref_path = out / f"{content}_ref.pfm"
        write_pfm(HdrImage(reference.astype(np.float32)), ref_path)
        if include_pristine:
            entries.append(ManifestEntry(ref_path, ref_path, 0.0, content))
        for kind in kinds:
            for level in range(1, levels + 1):
                distorted = _as_stored(distort(reference, kind, SEVERITIES[kind][level]))
                dist_path = out / f"{content}_{kind}{level}.pfm"
                write_pfm(HdrImage(distorted.astype(np.float32)), dist_path)
                score = oracle_dmos(reference, distorted)
                entries.append(ManifestEntry(ref_path, dist_path, score, content))

    manifest = DatasetManifest(entries=tuple(entries), dmos_range=DMOS_RANGE)
    save_manifest(manifest, out / MANIFEST_NAME)
    logger.info("Synthesized %d images over %d contents in %s", len(entries), n_contents, out)
    return manifest

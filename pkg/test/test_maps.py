"""Tests for quality maps, heatmaps, gratings, probes and the synthetic dataset."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from blindhdr.hdrio import DatasetManifest, HdrImage, load_manifest, read_pfm
from blindhdr.maps import (
    QualityMap,
    colormap,
    distort,
    grating_value,
    make_grating,
    oracle_dmos,
    oracle_resistance,
    quality_map_from_dict,
    render_heatmap,
    resistance_field,
    synth_dataset,
)
from blindhdr.maps.heatmap import heatmap_pixels
from blindhdr.maps.probe import probe_resistance, probe_scales
from blindhdr.maps.synth import MANIFEST_NAME, make_reference
from blindhdr.model import ModelBundle
from blindhdr.preprocess import extract_patches, patch_delta


def _qmap(values: list[list[float]]) -> QualityMap:
    rows, cols = np.shape(values)
    return QualityMap(
        values=np.array(values), patch_size=32, stride=32, source_dims=(32 * cols, 32 * rows)
    )


def test_quality_map_validates_grid() -> None:
    with pytest.raises(ValueError, match="does not match"):
        QualityMap(values=np.zeros((2, 2)), patch_size=32, stride=32, source_dims=(96, 64))


def test_quality_map_normalization() -> None:
    qmap = _qmap([[0.5, 2.0], [1.0, 0.0]])

    normalized = qmap.normalized()
    assert normalized.values.max() == 1.0
    assert normalized.normalization == "max-one"
    np.testing.assert_array_equal(normalized.values, [[0.25, 1.0], [0.5, 0.0]])

    zeros = _qmap([[0.0, 0.0]]).normalized()
    np.testing.assert_array_equal(zeros.values, [[0.0, 0.0]])


def test_quality_map_dict_round_trip() -> None:
    qmap = _qmap([[0.1, 0.2, 0.3]])

    restored = quality_map_from_dict(json.loads(json.dumps(qmap.to_dict())))
    np.testing.assert_array_equal(restored.values, qmap.values)
    assert restored.source_dims == (96, 32)
    with pytest.raises(ValueError):
        quality_map_from_dict({"values": [[1.0]]})


def test_colormap_endpoints() -> None:
    rgb = colormap(np.array([0.0, 0.5, 1.0]))

    assert rgb.tolist() == [[0, 0, 255], [0, 255, 0], [255, 0, 0]]


def test_uniform_map_renders_one_colour() -> None:
    pixels = heatmap_pixels(_qmap([[3.0, 3.0], [3.0, 3.0]]), block=4)

    assert pixels.shape == (8, 8, 3)
    assert np.all(pixels == pixels[0, 0])


def test_render_heatmap_dimensions(tmp_path: Path) -> None:
    qmap = _qmap([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]])

    ppm = render_heatmap(qmap, tmp_path / "map.ppm")
    png = render_heatmap(qmap, tmp_path / "map.png", block=2)
    with Image.open(ppm) as image:
        assert image.size == (3 * 32, 2 * 32)
        assert image.getpixel((0, 0)) == (0, 0, 255)
        assert image.getpixel((95, 63)) == (255, 0, 0)
    with Image.open(png) as image:
        assert image.size == (6, 4)
    with pytest.raises(ValueError):
        render_heatmap(qmap, tmp_path / "map.jpg")


def test_grating_peak_and_range() -> None:
    grating = make_grating(200, 100, peak=4000.0).plane()

    assert grating.shape == (100, 200)
    assert grating.max() == 4000.0
    assert grating.min() >= 0.0
    assert grating_value(0, 0, 200, 100, 4000.0) == 4000.0
    assert grating_value(17, 42, 200, 100, 4000.0) == pytest.approx(grating[42, 17])


def test_grating_scales_linearly() -> None:
    base = make_grating(120, 80, peak=4000.0).plane()

    np.testing.assert_allclose(make_grating(120, 80, peak=400.0).plane(), 0.1 * base, rtol=1e-12)


def test_grating_amplitude_falls_down_the_image() -> None:
    grating = make_grating(64, 64).plane()

    assert grating[0].max() > grating[-1].max() > 0.0
    with pytest.raises(ValueError):
        make_grating(0, 10)


def test_oracle_zero_severity_gives_zero_dmos(rng: np.random.Generator) -> None:
    reference = make_reference(rng, size=64)

    for kind in ("quantization", "blur", "blockdct"):
        assert oracle_dmos(reference, distort(reference, kind, 0.0)) == 0.0


def test_oracle_resistance_rises_with_contrast() -> None:
    flat = np.full((1, 32, 32), 100.0)
    textured = flat + np.where(np.indices((32, 32)).sum(axis=0) % 2, 50.0, -50.0)

    assert oracle_resistance(textured)[0] > oracle_resistance(flat)[0] > 0.0


def test_oracle_resistance_uses_local_contrast() -> None:
    ramp = np.tile(np.linspace(0.0, 400.0, 32), (32, 1))
    checker = 200.0 + np.where(np.indices((32, 32)).sum(axis=0) % 2, 1.0, -1.0) * ramp.std()

    assert ramp.std() == pytest.approx(checker.std())
    smooth, fine = oracle_resistance(np.stack([ramp, checker]))
    assert smooth < fine


def test_resistance_field_tiles_the_patch_grid(rng: np.random.Generator) -> None:
    reference = make_reference(rng, size=100)

    field = resistance_field(reference)
    t_star = oracle_resistance(extract_patches(reference).patches)
    assert field.shape == (100, 100)
    assert np.all(field[:32, :32] == t_star[0])
    assert field[99, 99] == t_star[-1]
    assert field[40, 70] == t_star[1 * 3 + 2]


def test_quantization_spreads_error_with_resistance(rng: np.random.Generator) -> None:
    reference = make_reference(rng, size=128)
    ref_patches = extract_patches(reference)
    t_star = oracle_resistance(ref_patches.patches)

    def spread(distorted: np.ndarray) -> float:
        ratio = patch_delta(ref_patches, extract_patches(distorted)) / t_star
        return float(ratio.std() / ratio.mean())

    uniform = 24.0 * np.rint(reference / 24.0)
    assert spread(distort(reference, "quantization", 24.0)) < spread(uniform)


def test_distort_rejects_unknown_kind() -> None:
    with pytest.raises(ValueError):
        distort(np.ones((8, 8)), "jpeg", 1.0)


def test_synth_dataset_layout(small_manifest: DatasetManifest, dataset_dir: Path) -> None:
    assert len(small_manifest) == 3 * (1 + 2 * 2)
    assert len(small_manifest.content_ids()) == 3
    assert small_manifest.content_ids()[0] == "synth-c00"
    assert load_manifest(dataset_dir / MANIFEST_NAME) == load_manifest(
        dataset_dir / MANIFEST_NAME
    )

    entry = small_manifest.entries[1]
    stored = read_pfm(entry.distorted_path).plane()
    reference = read_pfm(entry.reference_path).plane()
    assert oracle_dmos(reference, stored) == pytest.approx(entry.dmos, abs=1e-9)


def test_synth_dmos_increases_with_severity(small_manifest: DatasetManifest) -> None:
    scores = {entry.distorted_path.stem: entry.dmos for entry in small_manifest.entries}

    for content in small_manifest.content_ids():
        assert scores[f"{content}_ref"] == 0.0
        for kind in ("quantization", "blur"):
            assert 0.0 < scores[f"{content}_{kind}1"] < scores[f"{content}_{kind}2"]


def test_synth_dataset_is_reproducible(tmp_path: Path) -> None:
    first = tmp_path / "a" / "synth"
    second = tmp_path / "b" / "synth"
    synth_dataset(first, n_contents=2, levels=1, seed=5, size=64)
    synth_dataset(second, n_contents=2, levels=1, seed=5, size=64)

    names = sorted(path.name for path in first.iterdir())
    assert names == sorted(path.name for path in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_synth_dataset_rejects_bad_arguments(tmp_path: Path) -> None:
    with pytest.raises(ValueError):
        synth_dataset(tmp_path, n_contents=0)
    with pytest.raises(ValueError):
        synth_dataset(tmp_path, levels=9)
    with pytest.raises(ValueError):
        synth_dataset(tmp_path, kinds=("noise",))


def test_probe_resistance_is_positive_and_consistent(tanh_bundle: ModelBundle) -> None:
    flat = probe_resistance(tanh_bundle, HdrImage(np.full((64, 96), 500.0)))

    assert flat.grid_dims == (2, 3)
    assert np.all(flat.values > 0.0)
    np.testing.assert_allclose(flat.values, flat.values[0, 0], rtol=1e-12)


def test_probe_scales_on_grating(tanh_bundle: ModelBundle) -> None:
    maps = probe_scales(tanh_bundle, [0.5, 1.0], width=96, height=64, stride=32)

    assert sorted(maps) == [0.5, 1.0]
    for qmap in maps.values():
        assert qmap.grid_dims == (2, 3)
        assert np.all(qmap.values > 0.0)

"""Tests for perceptual transforms, feature maps and patch grids."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from blindhdr.preprocess import (
    CurveError,
    PatchGridError,
    PuCurve,
    default_pu_curve,
    extract_patches,
    feature_batch,
    feature_stack,
    gaussian_window,
    input_peak,
    load_pu_curve,
    mscn_map,
    patch_delta,
    photoreceptor_response,
    preprocess_luminance,
    pu_encode,
    save_pu_curve,
    tmo_drago,
    tmo_reinhard02,
    tmo_reinhard05,
    variance_map,
)
from blindhdr.preprocess.tonemap import ToneMapError


def test_default_pu_curve_covers_required_range() -> None:
    curve = default_pu_curve()

    assert curve.log_luminance[0] <= -5.0
    assert curve.log_luminance[-1] >= 4.0
    assert np.all(np.diff(curve.values) > 0)


def test_pu_encode_hits_knots_exactly() -> None:
    curve = default_pu_curve()
    knot = 100

    value = pu_encode(np.array([10.0 ** curve.log_luminance[knot]]), curve)
    assert value[0] == pytest.approx(curve.values[knot], rel=1e-12)


def test_pu_encode_interpolates_in_log_space() -> None:
    curve = PuCurve(
        log_luminance=np.array([-5.0, 0.0, 2.0, 4.0]), values=np.array([0.0, 10.0, 30.0, 50.0])
    )

    # Log-space midpoint of the knots at 1 and 100 cd/m².
    assert float(pu_encode(np.array(10.0), curve)) == pytest.approx(20.0)


def test_pu_encode_is_monotone(rng: np.random.Generator) -> None:
    a = 10.0 ** rng.uniform(-6.0, 5.0, size=10_000)
    b = 10.0 ** rng.uniform(-6.0, 5.0, size=10_000)
    low, high = np.minimum(a, b), np.maximum(a, b)

    assert np.all(pu_encode(low) <= pu_encode(high))


@pytest.mark.parametrize(
    "log_l, values",
    [
        ([-5.0], [1.0]),
        ([-5.0, 4.0, 3.0], [1.0, 2.0, 3.0]),
        ([-5.0, 0.0, 4.0], [1.0, 1.0, 3.0]),
        ([-3.0, 4.0], [1.0, 2.0]),
    ],
)
def test_pu_curve_rejects_bad_knots(log_l: list[float], values: list[float]) -> None:
    with pytest.raises(CurveError):
        PuCurve(log_luminance=np.array(log_l), values=np.array(values))


def test_pu_curve_file_round_trip(tmp_path: Path) -> None:
    path = tmp_path / "pu.txt"
    save_pu_curve(default_pu_curve(), path)

    loaded = load_pu_curve(path)
    np.testing.assert_array_equal(loaded.log_luminance, default_pu_curve().log_luminance)
    np.testing.assert_array_equal(loaded.values, default_pu_curve().values)


def test_drago_constant_and_peak() -> None:
    flat = tmo_drago(np.full((4, 4), 250.0))
    assert np.all(flat == flat[0, 0])

    ramp = np.linspace(0.0, 4000.0, 64).reshape(8, 8)
    mapped = tmo_drago(ramp, ld_max=100.0)
    # The brightest pixel lands on 1% of the display peak.
    assert mapped.max() == pytest.approx(1.0)
    assert np.all(np.diff(mapped.ravel()) > 0)


def test_reinhard02_constant_image() -> None:
    value = 50.0
    scaled = 0.18 / (value + 1e-6) * value

    out = tmo_reinhard02(np.full((3, 3), value))
    np.testing.assert_allclose(out, scaled / (1.0 + scaled))


def test_reinhard02_is_bounded(rng: np.random.Generator) -> None:
    out = tmo_reinhard02(rng.uniform(0.0, 1e4, size=(16, 16)))

    assert np.all(out >= 0.0)
    assert np.all(out < 1.0)


def test_reinhard02_key_is_linear() -> None:
    lum = np.array([[1.0, 10.0], [100.0, 1000.0]])

    def pre_compression(key: float) -> np.ndarray:
        out = tmo_reinhard02(lum, key=key)
        return out / (1.0 - out)

    np.testing.assert_allclose(pre_compression(0.36), 2.0 * pre_compression(0.18))


def test_photoreceptor_midpoint_and_monotone() -> None:
    assert float(photoreceptor_response(np.array(3.0), 3.0)) == pytest.approx(0.5)

    response = photoreceptor_response(np.linspace(0.0, 100.0, 50), 10.0)
    assert np.all(np.diff(response) > 0)
    assert float(photoreceptor_response(np.array(0.0), 0.0)) == 0.0


def test_reinhard05_range(rng: np.random.Generator) -> None:
    out = tmo_reinhard05(rng.uniform(0.0, 4000.0, size=(16, 16)))

    assert np.all(out >= 0.0)
    assert np.all(out < 1.0)


def test_tone_mapping_rejects_black_image() -> None:
    with pytest.raises(ToneMapError):
        tmo_reinhard02(np.zeros((4, 4)))


def test_gaussian_window_is_normalized() -> None:
    kernel = gaussian_window()

    assert kernel.shape == (7, 7)
    assert kernel.sum() == pytest.approx(1.0)
    assert kernel[3, 3] == kernel.max()


def test_constant_image_has_zero_features() -> None:
    flat = np.full((16, 16), 123.0)

    assert np.all(variance_map(flat) == 0.0)
    assert np.all(mscn_map(flat) == 0.0)


def test_mscn_scale_invariance_without_constant(rng: np.random.Generator) -> None:
    img = rng.uniform(1.0, 100.0, size=(20, 20))

    np.testing.assert_allclose(mscn_map(5.0 * img, c=0.0), mscn_map(img, c=0.0), atol=1e-9)


def test_mscn_single_bright_pixel() -> None:
    img = np.zeros((15, 15))
    img[7, 7] = 1.0
    weight = gaussian_window()[3, 3]
    mu, sigma = weight, np.sqrt(weight - weight**2)

    assert mscn_map(img, c=0.01)[7, 7] == pytest.approx((1.0 - mu) / (sigma + 0.01), rel=1e-9)


def test_variance_scales_quadratically(rng: np.random.Generator) -> None:
    img = rng.uniform(0.0, 10.0, size=(20, 20))

    np.testing.assert_allclose(variance_map(3.0 * img), 9.0 * variance_map(img), rtol=1e-9)


def test_checkerboard_variance_is_positive() -> None:
    board = (np.indices((16, 16)).sum(axis=0) % 2).astype(np.float64)

    assert np.all(variance_map(board)[3:-3, 3:-3] > 0.0)


def test_feature_map_rejects_small_image() -> None:
    with pytest.raises(ValueError):
        variance_map(np.ones((5, 5)))


def test_feature_stack_shapes_and_consistency(rng: np.random.Generator) -> None:
    patch = rng.uniform(0.0, 4000.0, size=(32, 32))

    stack = feature_stack(patch)
    assert stack.as_array().shape == (3, 32, 32)
    np.testing.assert_array_equal(stack.lum, patch)
    np.testing.assert_array_equal(stack.mscn, mscn_map(patch))
    assert np.all(stack.var >= 0.0)

    batch = feature_batch(np.stack([patch, patch]))
    assert batch.shape == (2, 3, 32, 32)


def test_feature_stack_of_constant_patch() -> None:
    stack = feature_stack(np.full((32, 32), 7.0))

    assert np.all(stack.lum == 7.0)
    assert np.all(stack.var == 0.0)
    assert np.all(stack.mscn == 0.0)


def test_extract_patches_exact_tiling() -> None:
    patches = extract_patches(np.zeros((64, 64)), size=32, stride=32)

    assert len(patches) == 4
    assert patches.coords.tolist() == [[0, 0], [0, 32], [32, 0], [32, 32]]
    assert patches.grid_dims == (2, 2)


def test_extract_patches_drops_remainder() -> None:
    assert len(extract_patches(np.zeros((70, 70)), size=32, stride=32)) == 4


def test_extract_patches_overlapping_stride() -> None:
    img = np.arange(64 * 64, dtype=np.float64).reshape(64, 64)

    patches = extract_patches(img, size=32, stride=16)
    assert len(patches) == 9
    np.testing.assert_array_equal(patches.patches[4], img[16:48, 16:48])


def test_extract_patches_rejects_small_image() -> None:
    with pytest.raises(PatchGridError):
        extract_patches(np.zeros((20, 40)), size=32, stride=32)


def test_patch_delta_examples() -> None:
    assert np.all(
        patch_delta(
            extract_patches(np.full((64, 64), 100.0)), extract_patches(np.full((64, 64), 90.0))
        )
        == 10.0
    )

    ref = extract_patches(np.array([[0.0, 2.0], [4.0, 6.0]]), size=2, stride=2)
    dist = extract_patches(np.array([[1.0, 1.0], [5.0, 5.0]]), size=2, stride=2)
    np.testing.assert_array_equal(patch_delta(ref, dist), [1.0])


def test_patch_delta_requires_matching_grids() -> None:
    with pytest.raises(PatchGridError):
        patch_delta(extract_patches(np.zeros((64, 64))), extract_patches(np.zeros((64, 96))))


def test_preprocess_modes_and_peaks(rng: np.random.Generator) -> None:
    lum = rng.uniform(0.01, 4000.0, size=(16, 16))

    plane, peak = preprocess_luminance(lum, "linear", 4000.0)
    np.testing.assert_array_equal(plane, lum)
    assert peak == 4000.0

    plane, peak = preprocess_luminance(lum, "pu", 4000.0)
    assert peak == pytest.approx(float(pu_encode(np.array(4000.0))))
    assert plane.max() <= peak

    for mode in ("drago", "reinhard02", "reinhard05"):
        plane, peak = preprocess_luminance(lum, mode, 4000.0)
        assert peak == input_peak(mode, 4000.0)
        assert np.all(plane <= peak + 1e-12)

    with pytest.raises(ValueError):
        input_peak("gamma", 4000.0)


def test_patch_delta_matches_pixel_loop(rng: np.random.Generator) -> None:
    ref = extract_patches(rng.uniform(0.0, 4000.0, size=(32, 32 * 1000)))
    dist = extract_patches(rng.uniform(0.0, 4000.0, size=(32, 32 * 1000)))
    assert len(ref) == 1000

    delta = patch_delta(ref, dist)
    for k in range(len(ref)):
        pairs = zip(ref.patches[k].ravel().tolist(), dist.patches[k].ravel().tolist())
        expected = math.fsum(abs(a - b) for a, b in pairs) / ref.patches[k].size
        assert delta[k] == pytest.approx(expected, rel=1e-12)


def test_patch_delta_is_a_metric(rng: np.random.Generator) -> None:
    a, b, c = (
        extract_patches(rng.uniform(0.0, 4000.0, size=(64, 320)), size=32, stride=16)
        for _ in range(3)
    )

    np.testing.assert_array_equal(patch_delta(a, b), patch_delta(b, a))
    assert np.all(patch_delta(a, a) == 0.0)
    assert np.all(patch_delta(a, c) <= patch_delta(a, b) + patch_delta(b, c) + 1e-9)


@pytest.mark.parametrize("size, stride", [(32, 32), (32, 16), (8, 3)])
def test_patch_coordinates_ignore_pixel_values(
    size: int, stride: int, rng: np.random.Generator
) -> None:
    noisy = rng.uniform(0.0, 4000.0, size=(70, 90))

    grids = [
        extract_patches(plane, size=size, stride=stride)
        for plane in (np.zeros((70, 90)), noisy, np.arange(70 * 90.0).reshape(70, 90))
    ]
    for grid in grids[1:]:
        np.testing.assert_array_equal(grid.coords, grids[0].coords)
        assert grid.same_grid(grids[0])
    for (row, col), patch in zip(grids[1].coords, grids[1].patches):
        np.testing.assert_array_equal(patch, noisy[row : row + size, col : col + size])


@pytest.mark.parametrize("operator", [tmo_drago, tmo_reinhard02, tmo_reinhard05, pu_encode])
def test_tone_curves_preserve_order(
    operator: Callable[[np.ndarray], np.ndarray], rng: np.random.Generator
) -> None:
    samples = np.sort(rng.uniform(0.01, 4000.0, size=5000)).reshape(50, 100)

    mapped = operator(samples).ravel()
    assert np.all(np.diff(mapped) >= 0.0)


def test_mscn_constant_is_negligible_at_hdr_scale(rng: np.random.Generator) -> None:
    img = rng.uniform(1.0, 10.0, size=(32, 32)) * 1e3

    stabilized = mscn_map(img, c=0.01)
    plain = mscn_map(img, c=0.0)
    np.testing.assert_allclose(stabilized, plain, rtol=1e-3, atol=0.0)
    assert np.all(np.abs(stabilized) <= np.abs(plain))


def test_flat_image_logs_default_contrast(caplog: pytest.LogCaptureFixture) -> None:
    caplog.set_level(logging.DEBUG, logger="blindhdr.preprocess.tonemap")

    out = tmo_reinhard05(np.full((4, 4), 5.0))
    assert np.all(out == out[0, 0])
    assert "contrast 0.3" in caplog.text

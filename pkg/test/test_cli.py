"""In-process tests of the command line: outputs, summaries and exit codes."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from blindhdr.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, exit_code_for, main
from blindhdr.commands import COMMANDS
from blindhdr.evaluation import EvaluationError, MetricError
from blindhdr.hdrio import read_pfm
from blindhdr.model import ModelBundle, TrainingError, load_bundle, save_bundle
from blindhdr.model.serialization import encode_bundle
from blindhdr.nn import NumericError
from blindhdr.utility.config import ConfigError


def _summary(capsys: pytest.CaptureFixture[str]) -> dict:
    out = capsys.readouterr().out
    return json.loads(out[out.index("{") :])


def test_missing_subcommand_is_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
    assert main([]) == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_unknown_flag_is_usage_error() -> None:
    assert main(["grating", "--bogus"]) == EXIT_USAGE


def test_missing_required_option_is_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["train"]) == EXIT_USAGE
    assert "--manifest" in capsys.readouterr().err


def test_invalid_option_value_is_usage_error() -> None:
    assert main(["train", "--manifest", "m.json", "--dropout", "1.5"]) == EXIT_USAGE


def test_config_file_with_unknown_key(tmp_path: Path) -> None:
    config_file = tmp_path / "run.json"
    config_file.write_text(json.dumps({"epochs": 1}), encoding="utf-8")

    assert main(["grating", "--config", str(config_file)]) == EXIT_USAGE


def test_grating_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    target = tmp_path / "grating.pfm"

    code = main(["grating", "--out", str(target), "--width", "64", "--height", "32"])
    assert code == EXIT_OK
    assert _summary(capsys) == {"grating": str(target), "width": 64, "height": 32}
    image = read_pfm(target)
    assert image.data.max() == 4000.0


def test_synth_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out_dir = tmp_path / "data"

    code = main(
        ["synth", "--out-dir", str(out_dir), "--contents", "2", "--levels", "1", "--size", "64"]
    )
    assert code == EXIT_OK
    summary = _summary(capsys)
    assert summary["images"] == 2 * (1 + 2)
    assert summary["contents"] == 2
    assert Path(summary["manifest"]).is_file()


def test_predict_and_heatmap_commands(
    tanh_bundle: ModelBundle, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    bundle_path = save_bundle(tanh_bundle, tmp_path / "model.bhw")
    image = tmp_path / "grating.pfm"
    assert main(["grating", "--out", str(image), "--width", "96", "--height", "64"]) == EXIT_OK
    capsys.readouterr()

    prediction = tmp_path / "prediction.json"
    heatmaps = tmp_path / "heatmaps"
    code = main(
        [
            "predict",
            "--bundle",
            str(bundle_path),
            "--image",
            str(image),
            "--out",
            str(prediction),
            "--heatmaps",
            str(heatmaps),
        ]
    )
    assert code == EXIT_OK
    summary = _summary(capsys)
    document = json.loads(prediction.read_text(encoding="utf-8"))
    assert document["score"] == summary["score"]
    assert sorted(document["maps"]) == ["delta", "dmos", "t"]
    assert document["score"] == pytest.approx(
        100.0 * float(np.mean(document["maps"]["dmos"]["values"]))
    )
    assert sorted(Path(path).name for path in summary["heatmaps"]) == [
        "delta.ppm",
        "dmos.ppm",
        "t.ppm",
    ]

    rendered = tmp_path / "t.png"
    code = main(
        ["heatmap", "--map-file", str(prediction), "--which", "t", "--out", str(rendered)]
    )
    assert code == EXIT_OK
    assert _summary(capsys)["grid"] == [2, 3]
    assert rendered.is_file()


def test_probe_command(
    tanh_bundle: ModelBundle, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    bundle_path = save_bundle(tanh_bundle, tmp_path / "model.bhw")
    target = tmp_path / "probe.json"

    code = main(
        [
            "probe",
            "--bundle",
            str(bundle_path),
            "--grating",
            "--width",
            "64",
            "--height",
            "64",
            "--scale",
            "0.5",
            "--scale",
            "2",
            "--out",
            str(target),
        ]
    )
    assert code == EXIT_OK
    summary = _summary(capsys)
    assert sorted(summary["t_range"]) == ["t@0.5", "t@2"]
    assert all(low > 0.0 for low, _ in summary["t_range"].values())
    assert sorted(json.loads(target.read_text(encoding="utf-8"))["maps"]) == ["t@0.5", "t@2"]


def test_missing_image_is_data_error(
    tanh_bundle: ModelBundle, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    bundle_path = save_bundle(tanh_bundle, tmp_path / "model.bhw")

    code = main(["predict", "--bundle", str(bundle_path), "--image", str(tmp_path / "no.pfm")])
    assert code == EXIT_DATA
    assert "FileNotFoundError" in capsys.readouterr().err


def test_corrupt_bundle_is_data_error(tmp_path: Path) -> None:
    bundle_path = tmp_path / "model.bhw"
    bundle_path.write_bytes(b"not a weight file")
    image = tmp_path / "grating.pfm"
    assert main(["grating", "--out", str(image), "--width", "32", "--height", "32"]) == EXIT_OK

    assert main(["predict", "--bundle", str(bundle_path), "--image", str(image)]) == EXIT_DATA


def test_bundle_with_malformed_directory_is_data_error(
    tanh_bundle: ModelBundle, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    line, payload = encode_bundle(tanh_bundle).split(b"\n", 1)
    header = json.loads(line)
    del header["tensors"][0]["offset"]
    bundle_path = tmp_path / "model.bhw"
    bundle_path.write_bytes(json.dumps(header).encode("utf-8") + b"\n" + payload)
    image = tmp_path / "grating.pfm"
    assert main(["grating", "--out", str(image), "--width", "32", "--height", "32"]) == EXIT_OK

    assert main(["predict", "--bundle", str(bundle_path), "--image", str(image)]) == EXIT_DATA
    assert "BundleError" in capsys.readouterr().err


@pytest.mark.parametrize("document", ["[1, 2]", '"maps"', '{"maps": [1]}', '{"maps": {"t": 5}}'])
def test_heatmap_rejects_other_json(
    document: str, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    map_file = tmp_path / "maps.json"
    map_file.write_text(document, encoding="utf-8")

    code = main(
        ["heatmap", "--map-file", str(map_file), "--which", "t", "--out-dir", str(tmp_path)]
    )
    assert code == EXIT_DATA
    err = capsys.readouterr().err
    assert err.startswith("blindhdr: ")
    assert len(err.strip().splitlines()) == 1


@pytest.mark.parametrize(
    "exc, code",
    [
        (KeyError("offset"), EXIT_DATA),
        (TypeError("unhashable"), EXIT_DATA),
        (TrainingError("E-Net parameters changed while frozen"), EXIT_NUMERIC),
    ],
)
def test_command_failures_become_exit_codes(
    exc: BaseException,
    code: int,
    monkeypatch: pytest.MonkeyPatch,
    capsys: pytest.CaptureFixture[str],
) -> None:
    def failing(run: object) -> dict:
        raise exc

    monkeypatch.setitem(COMMANDS, "grating", failing)

    assert main(["grating"]) == code
    assert type(exc).__name__ in capsys.readouterr().err


def test_eval_without_manifests_is_usage_error() -> None:
    assert main(["eval"]) == EXIT_USAGE
    assert main(["eval", "--train-manifest", "a.json"]) == EXIT_USAGE


def test_train_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    data = tmp_path / "data"
    assert (
        main(["synth", "--out-dir", str(data), "--contents", "2", "--levels", "1", "--size", "64"])
        == EXIT_OK
    )
    capsys.readouterr()
    target = tmp_path / "model.bhw"

    code = main(
        [
            "train",
            "--manifest",
            str(data / "manifest.json"),
            "--epochs-stage1",
            "1",
            "--epochs-stage2",
            "1",
            "--batch-size",
            "8",
            "--seed",
            "3",
            "--out",
            str(target),
        ]
    )
    assert code == EXIT_OK
    summary = _summary(capsys)
    assert len(summary["stage1_loss"]) == 1
    assert len(summary["stage2_loss"]) == 1
    assert summary["k"] > 0.0
    assert load_bundle(target).config.fingerprint() == summary["fingerprint"]


@pytest.mark.parametrize(
    "exc, code",
    [
        (ConfigError("bad flag"), EXIT_USAGE),
        (ValueError("bad file"), EXIT_DATA),
        (FileNotFoundError("gone"), EXIT_DATA),
        (NumericError("nan"), EXIT_NUMERIC),
        (TrainingError("weights changed while frozen"), EXIT_NUMERIC),
    ],
)
def test_exit_code_mapping(exc: BaseException, code: int) -> None:
    assert exit_code_for(exc) == code


def test_evaluation_error_maps_through_its_cause() -> None:
    for cause, code in ((NumericError("nan loss"), EXIT_NUMERIC), (MetricError("x"), EXIT_DATA)):
        try:
            raise EvaluationError("split 0 failed", 0) from cause
        except EvaluationError as exc:
            assert exit_code_for(exc) == code


@pytest.mark.slow
def test_gradcheck_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    target = tmp_path / "gradcheck.json"

    assert main(["gradcheck", "--activation", "tanh", "--out", str(target)]) == EXIT_OK
    report = json.loads(target.read_text(encoding="utf-8"))
    assert report["ok"] is True
    assert max(report["max_relative_error"].values()) < 1e-4
    assert _summary(capsys)["ok"] is True

"""Argument parsing and error-to-exit-code mapping for the ``blindhdr`` command."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Sequence

from .commands import COMMANDS
from .evaluation import EvaluationError
from .model import TrainingError
from .nn import NumericError
from .utility.config import ConfigError, resolve_run_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

# Errors a command may raise; each becomes a one-line diagnostic and an exit code.
COMMAND_ERRORS = (ValueError, OSError, ArithmeticError, RuntimeError, LookupError, TypeError)


class UsageError(Exception):
    """Raised instead of argparse's own exit on malformed command lines."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file of option values; flags override it")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--out", help="output file")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory")


def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--l-peak", dest="l_peak", type=float)
    parser.add_argument("--d-scale", dest="d_scale", type=float)
    parser.add_argument("--dropout", type=float)
    parser.add_argument("--activation", choices=("relu", "tanh"))
    parser.add_argument(
        "--preprocess", choices=("linear", "pu", "drago", "reinhard02", "reinhard05")
    )
    parser.add_argument(
        "--no-pool",
        dest="no_pool",
        action="store_true",
        default=None,
        help="P-Net without pooling layers",
    )


def _add_training(parser: argparse.ArgumentParser) -> None:
    _add_model(parser)
    parser.add_argument("--epochs-stage1", dest="epochs_stage1", type=int)
    parser.add_argument("--epochs-stage2", dest="epochs_stage2", type=int)
    parser.add_argument("--batch-size", dest="batch_size", type=int)
    parser.add_argument("--learning-rate", dest="learning_rate", type=float)
    parser.add_argument("--stride", type=int)


def _add_grating(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--width", type=int)
    parser.add_argument("--height", type=int)
    parser.add_argument("--peak", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blindhdr", description="No-reference HDR image quality toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="generate the synthetic scored dataset")
    _add_common(synth)
    synth.add_argument("--contents", type=int)
    synth.add_argument("--levels", type=int)
    synth.add_argument("--size", type=int)
    synth.add_argument("--peak", type=float)
    synth.add_argument("--kind", dest="kinds", action="append")
    synth.add_argument(
        "--no-pristine", dest="include_pristine", action="store_false", default=None
    )

    train = commands.add_parser("train", help="two-stage training")
    _add_common(train)
    _add_training(train)
    train.add_argument("--manifest")

    predict = commands.add_parser("predict", help="score an image")
    _add_common(predict)
    predict.add_argument("--bundle")
    predict.add_argument("--image")
    predict.add_argument("--stride", type=int)
    predict.add_argument("--heatmaps", help="directory for DMOS, noise and resistance heatmaps")

    evaluate = commands.add_parser("eval", help="split or cross-dataset evaluation")
    _add_common(evaluate)
    _add_training(evaluate)
    evaluate.add_argument("--manifest")
    evaluate.add_argument("--train-manifest", dest="train_manifests", action="append")
    evaluate.add_argument("--test-manifest", dest="test_manifests", action="append")
    evaluate.add_argument("--iterations", type=int)
    evaluate.add_argument("--train-fraction", dest="train_fraction", type=float)
    evaluate.add_argument("--cycles", type=int)

    heatmap = commands.add_parser("heatmap", help="render a saved map")
    _add_common(heatmap)
    heatmap.add_argument("--map-file", dest="map_file")
    heatmap.add_argument("--which", choices=("dmos", "delta", "t"))

    grating = commands.add_parser("grating", help="write the chirped grating")
    _add_common(grating)
    _add_grating(grating)

    probe = commands.add_parser("probe", help="error-resistance maps")
    _add_common(probe)
    _add_grating(probe)
    probe.add_argument("--bundle")
    probe.add_argument("--image")
    probe.add_argument("--grating", action="store_true", default=None)
    probe.add_argument("--scale", dest="scales", type=float, action="append")
    probe.add_argument("--stride", type=int)
    probe.add_argument("--heatmaps")

    gradcheck = commands.add_parser("gradcheck", help="finite-difference gradient check")
    _add_common(gradcheck)
    _add_model(gradcheck)
    gradcheck.add_argument("--bundle")
    gradcheck.add_argument("--tolerance", type=float)

    return parser


def exit_code_for(exc: BaseException) -> int:
    cause = exc.__cause__ if isinstance(exc, EvaluationError) and exc.__cause__ else exc
    if isinstance(cause, ConfigError):
        return EXIT_USAGE
    if isinstance(cause, (NumericError, TrainingError)):
        return EXIT_NUMERIC
    return EXIT_DATA


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"blindhdr: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    options: dict[str, Any] = vars(args)
    command = options.pop("command")
    config_file = options.pop("config")
    try:
        run = resolve_run_config(command, options, config_file)
    except ConfigError as exc:
        print(f"blindhdr: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"blindhdr: {exc}", file=sys.stderr)
        return EXIT_DATA

    logger.info("Resolved config: %s", run.to_json())
    try:
        summary = COMMANDS[command](run)
    except COMMAND_ERRORS as exc:
        code = exit_code_for(exc)
        print(f"blindhdr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code

    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK

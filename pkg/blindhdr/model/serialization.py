"""Weight files: one JSON header line followed by a little-endian float64 payload."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from ..utility.files import atomic_write_bytes
from .bundle import ModelBundle
from .config import ModelConfig

logger = logging.getLogger(__name__)

FORMAT_NAME = "blindhdr-weights"
FORMAT_VERSION = 1


class BundleError(ValueError):
    """Raised for corrupt, mismatched or unreadable weight files."""


def _checksum(directory: list[dict[str, Any]], payload: bytes) -> str:
    """SHA-256 over the canonical tensor directory followed by the payload."""

    sha = hashlib.sha256()
    sha.update(json.dumps(directory, sort_keys=True, separators=(",", ":")).encode("utf-8"))
    sha.update(b"\n")
    sha.update(payload)
    return sha.hexdigest()


def _is_count(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


def _tensor_directory(header: dict[str, Any], path: Path) -> list[dict[str, Any]]:
    entries = header.get("tensors")
    if not isinstance(entries, list):
        raise BundleError(f"{path}: malformed tensor directory")
    for position, entry in enumerate(entries):
        if (
            not isinstance(entry, dict)
            or not isinstance(entry.get("name"), str)
            or not isinstance(entry.get("shape"), list)
            or not all(_is_count(size) for size in entry["shape"])
            or not _is_count(entry.get("offset"))
            or not isinstance(entry.get("trainable"), bool)
        ):
            raise BundleError(f"{path}: malformed tensor directory entry {position}")
    return entries


def encode_bundle(bundle: ModelBundle) -> bytes:
    directory = []
    chunks = []
    offset = 0
    for parameter in bundle.tensors():
        data = np.ascontiguousarray(parameter.value, dtype="<f8").tobytes()
        directory.append(
            {
                "name": parameter.name,
                "shape": list(parameter.shape),
                "offset": offset,
                "trainable": parameter.trainable,
            }
        )
        chunks.append(data)
        offset += len(data)
    payload = b"".join(chunks)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "config": bundle.config.to_dict(),
        "fingerprint": bundle.config.fingerprint(),
        "tensors": directory,
        "checksum": _checksum(directory, payload),
    }
    line = json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n"
    return line.encode("utf-8") + payload


def save_bundle(bundle: ModelBundle, path: str | Path) -> Path:
    target = atomic_write_bytes(path, encode_bundle(bundle))
    logger.info("Saved weights to %s (fingerprint %s)", target, bundle.config.fingerprint()[:12])
    return target


def _parse_header(raw: bytes, path: Path) -> tuple[dict, bytes]:
    newline = raw.find(b"\n")
    if newline < 0:
        raise BundleError(f"{path}: missing weight file header")
    try:
        header = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleError(f"{path}: unreadable weight file header") from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise BundleError(f"{path}: not a weight file")
    if header.get("version") != FORMAT_VERSION:
        raise BundleError(f"{path}: unsupported weight file version {header.get('version')}")
    return header, raw[newline + 1 :]


def load_bundle(path: str | Path, expected: ModelConfig | None = None) -> ModelBundle:
    """Read a weight file, verifying checksum and architecture fingerprint.

    When ``expected`` is given its fingerprint must match the stored one.
    """

    path = Path(path)
    header, payload = _parse_header(path.read_bytes(), path)

    entries = _tensor_directory(header, path)
    if _checksum(entries, payload) != header.get("checksum"):
        raise BundleError(f"{path}: payload checksum mismatch")
    try:
        config = ModelConfig.from_dict(header["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"{path}: invalid model config in header") from exc
    if config.fingerprint() != header.get("fingerprint"):
        raise BundleError(f"{path}: config fingerprint mismatch")
    if expected is not None and expected.fingerprint() != header["fingerprint"]:
        raise BundleError(
            f"{path}: config fingerprint mismatch (file {header['fingerprint'][:12]}, "
            f"expected {expected.fingerprint()[:12]})"
        )

    bundle = ModelBundle.initialize(config)
    tensors = bundle.tensors()
    if sorted(entry["name"] for entry in entries) != sorted(tensors.names()):
        raise BundleError(f"{path}: tensor directory does not match the architecture")
    for entry in entries:
        parameter = tensors[entry["name"]]
        if tuple(entry["shape"]) != parameter.shape:
            raise BundleError(f"{path}: shape mismatch for {entry['name']}")
        count = parameter.value.size
        start = entry["offset"]
        end = start + count * 8
        if end > len(payload):
            raise BundleError(f"{path}: payload truncated at {entry['name']}")
        values = np.frombuffer(payload, dtype="<f8", count=count, offset=start)
        parameter.value[...] = values.reshape(parameter.shape)
        parameter.trainable = bool(entry["trainable"])
    logger.info("Loaded weights from %s", path)
    return bundle

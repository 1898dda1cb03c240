"""Portable float map reader and writer."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import BinaryIO

import numpy as np

from ..utility.files import atomic_write_bytes
from .image import HdrFormatError, HdrImage

logger = logging.getLogger(__name__)


def _read_token_line(handle: BinaryIO, offset: int) -> tuple[str, int]:
    line = handle.readline()
    if not line:
        raise HdrFormatError(f"unexpected end of file in PFM header at byte {offset}")
    try:
        return line.decode("ascii").strip(), offset + len(line)
    except UnicodeDecodeError as exc:
        raise HdrFormatError(f"non-ASCII PFM header at byte {offset}") from exc


def _parse_header(handle: BinaryIO) -> tuple[int, int, int, str, int]:
    identifier, offset = _read_token_line(handle, 0)
    if identifier == "PF":
        channels = 3
    elif identifier == "Pf":
        channels = 1
    else:
        raise HdrFormatError(f"unrecognized PFM identifier {identifier!r} at byte 0")

    dims_offset = offset
    dims, offset = _read_token_line(handle, offset)
    parts = dims.split()
    if len(parts) != 2:
        raise HdrFormatError(f"malformed PFM dimensions line {dims!r} at byte {dims_offset}")
    try:
        width, height = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise HdrFormatError(f"non-integer PFM dimensions at byte {dims_offset}") from exc
    if width <= 0 or height <= 0:
        raise HdrFormatError(f"PFM dimensions must be positive at byte {dims_offset}")

    scale_offset = offset
    scale_text, offset = _read_token_line(handle, offset)
    try:
        scale = float(scale_text)
    except ValueError as exc:
        raise HdrFormatError(f"malformed PFM scale {scale_text!r} at byte {scale_offset}") from exc
    if scale == 0 or not np.isfinite(scale):
        raise HdrFormatError(f"PFM scale must be finite and non-zero at byte {scale_offset}")

    # Negative scale means little-endian payload.
    byte_order = "<" if scale < 0 else ">"
    return width, height, channels, byte_order, offset


def read_pfm(path: str | Path) -> HdrImage:
    """Read a PFM file into a top-down :class:`HdrImage` with values as stored."""

    with open(path, "rb") as handle:
        width, height, channels, byte_order, payload_offset = _parse_header(handle)
        count = width * height * channels
        payload = handle.read(count * 4)

    if len(payload) < count * 4:
        raise HdrFormatError(
            f"truncated PFM payload: expected {count * 4} bytes at byte {payload_offset}, "
            f"got {len(payload)}"
        )

    values = np.frombuffer(payload, dtype=np.dtype(f"{byte_order}f4")).astype(np.float32)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise HdrFormatError(
            f"non-finite PFM value at byte {payload_offset + int(bad[0]) * 4}"
        )
    negative = np.flatnonzero(values < 0)
    if negative.size:
        raise HdrFormatError(
            f"negative PFM value at byte {payload_offset + int(negative[0]) * 4}"
        )

    # Scanlines are stored bottom-to-top.
    data = values.reshape(height, width, channels)[::-1].copy()
    logger.debug("Read PFM %s (%dx%d, %d channel)", path, width, height, channels)
    return HdrImage(data)


def encode_pfm(image: HdrImage) -> bytes:
    if image.width == 0 or image.height == 0:
        raise HdrFormatError("cannot encode an empty image as PFM")
    identifier = "PF" if image.channels == 3 else "Pf"
    header = f"{identifier}\n{image.width} {image.height}\n-1.0\n".encode("ascii")
    payload = np.ascontiguousarray(image.data[::-1], dtype="<f4").tobytes()
    return header + payload


def write_pfm(image: HdrImage, path: str | Path) -> None:
    """Write ``image`` as a little-endian PFM file."""

    atomic_write_bytes(path, encode_pfm(image))
    logger.debug("Wrote PFM %s", path)

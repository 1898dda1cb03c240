"""Radiance RGBE (.hdr) reader and writer."""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import BinaryIO

import numpy as np

from ..utility.files import atomic_write_bytes
from .image import HdrFormatError, HdrImage

logger = logging.getLogger(__name__)

RESOLUTION_PATTERN = re.compile(rb"^-Y (\d+) \+X (\d+)$")
SUPPORTED_FORMAT = b"32-bit_rle_rgbe"
MIN_RLE_WIDTH = 8
MAX_RLE_WIDTH = 0x7FFF


def rgbe_to_float(rgbe: np.ndarray) -> np.ndarray:
    """Decode ``(..., 4)`` uint8 quadruples to linear ``(..., 3)`` float32 triplets."""

    mantissa = rgbe[..., :3].astype(np.float64)
    exponent = rgbe[..., 3:].astype(np.int32)
    rgb = np.ldexp(mantissa, exponent - (128 + 8))
    rgb[rgbe[..., 3] == 0] = 0.0
    return rgb.astype(np.float32)


def float_to_rgbe(rgb: np.ndarray) -> np.ndarray:
    """Encode linear triplets with a shared exponent, rounding mantissas to nearest."""

    rgb = np.asarray(rgb, dtype=np.float64)
    brightest = rgb.max(axis=-1)
    _, exponent = np.frexp(brightest)
    mantissa = np.floor(rgb * np.ldexp(1.0, 8 - exponent)[..., None] + 0.5)

    # Rounding the brightest channel up to 256 moves the pixel to the next exponent.
    overflow = mantissa.max(axis=-1) > 255
    exponent = np.where(overflow, exponent + 1, exponent)
    mantissa = np.floor(rgb * np.ldexp(1.0, 8 - exponent)[..., None] + 0.5)

    out = np.zeros(rgb.shape[:-1] + (4,), dtype=np.uint8)
    visible = brightest > 1e-32
    out[..., :3] = np.where(visible[..., None], np.clip(mantissa, 0, 255), 0)
    out[..., 3] = np.where(visible, np.clip(exponent + 128, 0, 255), 0)
    return out


def _parse_header(handle: BinaryIO) -> tuple[int, int]:
    magic = handle.readline().rstrip(b"\n")
    if magic != b"#?RADIANCE":
        raise HdrFormatError(f"unsupported Radiance header variant {magic[:32]!r}")

    while True:
        line = handle.readline()
        if not line:
            raise HdrFormatError("unexpected end of file in Radiance header")
        line = line.rstrip(b"\n")
        if not line:
            break
        if line.startswith(b"FORMAT=") and line[len(b"FORMAT="):] != SUPPORTED_FORMAT:
            fmt = line.decode(errors="replace")
            raise HdrFormatError(f"unsupported Radiance pixel format {fmt}")

    resolution = handle.readline().rstrip(b"\n")
    match = RESOLUTION_PATTERN.match(resolution)
    if match is None:
        raise HdrFormatError(
            f"unsupported Radiance resolution line {resolution.decode(errors='replace')!r}; "
            "only '-Y h +X w' is supported"
        )
    height, width = int(match.group(1)), int(match.group(2))
    if width <= 0 or height <= 0:
        raise HdrFormatError("Radiance image dimensions must be positive")
    return width, height


def _read_exact(handle: BinaryIO, count: int, row: int) -> bytes:
    chunk = handle.read(count)
    if len(chunk) != count:
        raise HdrFormatError(f"truncated Radiance scanline {row}")
    return chunk


def _read_rle_scanline(handle: BinaryIO, width: int, row: int) -> np.ndarray:
    scanline = np.zeros((width, 4), dtype=np.uint8)
    for component in range(4):
        position = 0
        while position < width:
            code = _read_exact(handle, 1, row)[0]
            if code > 128:
                count = code - 128
                if position + count > width:
                    raise HdrFormatError(f"scanline length mismatch in row {row}")
                scanline[position:position + count, component] = _read_exact(handle, 1, row)[0]
            else:
                count = code
                if count == 0 or position + count > width:
                    raise HdrFormatError(f"scanline length mismatch in row {row}")
                literal = _read_exact(handle, count, row)
                scanline[position:position + count, component] = np.frombuffer(literal, np.uint8)
            position += count
    return scanline


def _read_scanline(handle: BinaryIO, width: int, row: int) -> np.ndarray:
    head = _read_exact(handle, 4, row)
    if MIN_RLE_WIDTH <= width <= MAX_RLE_WIDTH and head[0] == 2 and head[1] == 2:
        if head[2] & 0x80:
            raise HdrFormatError(f"malformed RLE marker in row {row}")
        encoded_width = (head[2] << 8) | head[3]
        if encoded_width != width:
            raise HdrFormatError(
                f"scanline length mismatch in row {row}: {encoded_width} != {width}"
            )
        return _read_rle_scanline(handle, width, row)

    flat = np.frombuffer(head + _read_exact(handle, (width - 1) * 4, row), np.uint8)
    flat = flat.reshape(width, 4)
    if np.any(np.all(flat[:, :3] == 1, axis=1)):
        raise HdrFormatError(f"old-style RLE scanline in row {row} is not supported")
    return flat


def read_rgbe(path: str | Path) -> HdrImage:
    """Read a Radiance RGBE file into a top-down three-channel :class:`HdrImage`."""

    with open(path, "rb") as handle:
        width, height = _parse_header(handle)
        rgbe = np.empty((height, width, 4), dtype=np.uint8)
        for row in range(height):
            rgbe[row] = _read_scanline(handle, width, row)

    logger.debug("Read RGBE %s (%dx%d)", path, width, height)
    return HdrImage(rgbe_to_float(rgbe))


def _encode_component(values: np.ndarray) -> bytes:
    """Run-length encode one component of a scanline (runs of 4+ become run packets)."""

    out = bytearray()
    width = len(values)
    position = 0
    while position < width:
        run_start = position
        run_length = 0
        # Find the next run of at least four equal bytes.
        while run_start < width:
            run_length = 1
            while (
                run_start + run_length < width
                and run_length < 127
                and values[run_start + run_length] == values[run_start]
            ):
                run_length += 1
            if run_length >= 4:
                break
            run_start += run_length
        if run_length < 4:
            run_start = width

        while position < run_start:
            count = min(128, run_start - position)
            out.append(count)
            out.extend(bytes(values[position:position + count]))
            position += count

        if run_start < width:
            out.append(128 + run_length)
            out.append(int(values[run_start]))
            position = run_start + run_length
    return bytes(out)


def encode_rgbe(image: HdrImage) -> bytes:
    if image.width == 0 or image.height == 0:
        raise HdrFormatError("cannot encode an empty image as RGBE")
    data = image.data.astype(np.float64)
    if image.channels == 1:
        data = np.repeat(data, 3, axis=2)

    header = (
        b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n"
        + f"-Y {image.height} +X {image.width}\n".encode("ascii")
    )
    rgbe = float_to_rgbe(data)
    body = bytearray()
    use_rle = MIN_RLE_WIDTH <= image.width <= MAX_RLE_WIDTH
    for row in rgbe:
        if not use_rle:
            body.extend(row.tobytes())
            continue
        body.extend(bytes([2, 2, image.width >> 8, image.width & 0xFF]))
        for component in range(4):
            body.extend(_encode_component(row[:, component]))
    return header + bytes(body)


def write_rgbe(image: HdrImage, path: str | Path) -> None:
    """Write ``image`` as Radiance RGBE, using new-style RLE where the width allows it."""

    atomic_write_bytes(path, encode_rgbe(image))
    logger.debug("Wrote RGBE %s", path)

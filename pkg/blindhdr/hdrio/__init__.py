"""HDR file formats, luminance extraction and dataset manifests."""

from __future__ import annotations

from pathlib import Path

from .image import HdrFormatError, HdrImage, luminance
from .manifest import (
    DatasetManifest,
    ManifestEntry,
    ManifestError,
    load_manifest,
    save_manifest,
)
from .pfm import read_pfm, write_pfm
from .rgbe import read_rgbe, write_rgbe

RGBE_SUFFIXES = (".hdr", ".rgbe", ".pic")


def read_image(path: str | Path) -> HdrImage:
    """Read a PFM or Radiance file, chosen by extension."""

    suffix = Path(path).suffix.lower()
    if suffix == ".pfm":
        return read_pfm(path)
    if suffix in RGBE_SUFFIXES:
        return read_rgbe(path)
    raise HdrFormatError(f"unsupported HDR file extension {suffix!r} for {path}")


def write_image(image: HdrImage, path: str | Path) -> None:
    suffix = Path(path).suffix.lower()
    if suffix == ".pfm":
        write_pfm(image, path)
    elif suffix in RGBE_SUFFIXES:
        write_rgbe(image, path)
    else:
        raise HdrFormatError(f"unsupported HDR file extension {suffix!r} for {path}")


__all__ = [
    "DatasetManifest",
    "HdrFormatError",
    "HdrImage",
    "ManifestEntry",
    "ManifestError",
    "load_manifest",
    "luminance",
    "read_image",
    "read_pfm",
    "read_rgbe",
    "save_manifest",
    "write_image",
    "write_pfm",
    "write_rgbe",
]

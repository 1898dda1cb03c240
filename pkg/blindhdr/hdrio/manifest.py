"""Dataset manifests pairing distorted images with references and DMOS scores."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from ..utility.files import write_json

logger = logging.getLogger(__name__)


class ManifestError(ValueError):
    """Raised when a manifest is malformed or violates its invariants."""


@dataclass(frozen=True)
class ManifestEntry:
    reference_path: Path
    distorted_path: Path
    dmos: float
    content_id: str


@dataclass(frozen=True)
class DatasetManifest:
    """Validated, order-preserving list of entries plus the declared DMOS range."""

    entries: tuple[ManifestEntry, ...]
    dmos_range: tuple[float, float]

    def __post_init__(self) -> None:
        _validate(self.entries, self.dmos_range)

    def __len__(self) -> int:
        return len(self.entries)

    def content_ids(self) -> list[str]:
        """Distinct content ids in first-appearance order."""

        return list(dict.fromkeys(entry.content_id for entry in self.entries))

    def subset(self, content_ids: Iterable[str]) -> DatasetManifest:
        wanted = set(content_ids)
        return DatasetManifest(
            entries=tuple(entry for entry in self.entries if entry.content_id in wanted),
            dmos_range=self.dmos_range,
        )

    @staticmethod
    def union(manifests: Sequence[DatasetManifest]) -> DatasetManifest:
        if not manifests:
            raise ManifestError("empty manifest")
        low = min(manifest.dmos_range[0] for manifest in manifests)
        high = max(manifest.dmos_range[1] for manifest in manifests)
        entries = tuple(entry for manifest in manifests for entry in manifest.entries)
        return DatasetManifest(entries=entries, dmos_range=(low, high))


def _validate(entries: Sequence[ManifestEntry], dmos_range: tuple[float, float]) -> None:
    if not entries:
        raise ManifestError("empty manifest")

    low, high = dmos_range
    if not low < high:
        raise ManifestError(f"invalid dmos_range [{low}, {high}]")

    seen: set[Path] = set()
    reference_of: dict[str, Path] = {}
    content_of: dict[Path, str] = {}
    for index, entry in enumerate(entries):
        if entry.distorted_path in seen:
            raise ManifestError(f"duplicate distorted path {entry.distorted_path}")
        seen.add(entry.distorted_path)

        if not low <= entry.dmos <= high:
            raise ManifestError(
                f"entry {index}: dmos {entry.dmos} outside declared range [{low}, {high}]"
            )

        known_reference = reference_of.setdefault(entry.content_id, entry.reference_path)
        known_content = content_of.setdefault(entry.reference_path, entry.content_id)
        if known_reference != entry.reference_path or known_content != entry.content_id:
            raise ManifestError(
                f"entry {index}: content id {entry.content_id!r} does not match its reference"
            )


def _require_field(raw: dict[str, Any], name: str, index: int) -> Any:
    if name not in raw:
        raise ManifestError(f"entry {index} is missing field {name!r}")
    return raw[name]


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a JSON manifest; paths resolve relative to the manifest file."""

    manifest_path = Path(path)
    try:
        document = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc

    if not isinstance(document, dict):
        raise ManifestError("manifest must be a JSON object")
    raw_range = document.get("dmos_range")
    if not isinstance(raw_range, list) or len(raw_range) != 2:
        raise ManifestError("manifest needs a two-element dmos_range")
    raw_entries = document.get("entries")
    if not isinstance(raw_entries, list):
        raise ManifestError("manifest needs an entries list")
    if not raw_entries:
        raise ManifestError("empty manifest")

    base = manifest_path.resolve().parent
    entries: list[ManifestEntry] = []
    for index, raw in enumerate(raw_entries):
        if not isinstance(raw, dict):
            raise ManifestError(f"entry {index} must be a JSON object")
        reference = base / str(_require_field(raw, "ref", index))
        distorted = base / str(_require_field(raw, "dist", index))
        for candidate in (reference, distorted):
            if not candidate.is_file():
                raise ManifestError(f"entry {index}: missing file {candidate}")
        try:
            dmos = float(_require_field(raw, "dmos", index))
        except (TypeError, ValueError) as exc:
            raise ManifestError(f"entry {index}: dmos must be a number") from exc
        entries.append(
            ManifestEntry(
                reference_path=reference,
                distorted_path=distorted,
                dmos=dmos,
                content_id=str(_require_field(raw, "content", index)),
            )
        )

    manifest = DatasetManifest(
        entries=tuple(entries), dmos_range=(float(raw_range[0]), float(raw_range[1]))
    )
    logger.info(
        "Loaded manifest %s: %d entries, %d contents",
        manifest_path,
        len(manifest),
        len(manifest.content_ids()),
    )
    return manifest


def save_manifest(manifest: DatasetManifest, path: str | Path) -> Path:
    """Write ``manifest`` with paths relative to the manifest file's directory."""

    base = Path(path).resolve().parent

    def _relative(target: Path) -> str:
        return Path(os.path.relpath(target.resolve(), base)).as_posix()

    document = {
        "dmos_range": [manifest.dmos_range[0], manifest.dmos_range[1]],
        "entries": [
            {
                "ref": _relative(entry.reference_path),
                "dist": _relative(entry.distorted_path),
                "dmos": entry.dmos,
                "content": entry.content_id,
            }
            for entry in manifest.entries
        ],
    }
    return write_json(path, document)

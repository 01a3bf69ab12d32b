"""Image manifest parsing.

A manifest is a CSV of ``path,label,task_id`` rows. Relative paths are
resolved against the manifest's own directory so a manifest travels with
its images.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class ManifestError(Exception):
    """Malformed manifest row or a referenced image that does not exist."""


@dataclass(frozen=True)
class ManifestRow:
    path: Path
    label: int
    task_id: int


def read_manifest(
    path: str | Path, num_classes: int | None = None
) -> list[ManifestRow]:
    """Parse and validate a manifest.

    With ``num_classes`` given, labels must fall in [0, num_classes);
    otherwise any nonnegative label is accepted and the class count is
    inferred later as max(label) + 1.
    """
    path = Path(path)
    base = path.parent
    rows: list[ManifestRow] = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or (lineno == 1 and raw[:1] == ["path"]):
                continue
            if len(raw) != 3:
                raise ManifestError(
                    f"{path}:{lineno}: expected 3 columns (path,label,task_id), got {len(raw)}"
                )
            try:
                label, task_id = int(raw[1]), int(raw[2])
            except ValueError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from exc
            if label < 0 or task_id < 0:
                raise ManifestError(
                    f"{path}:{lineno}: label and task_id must be >= 0"
                )
            if num_classes is not None and label >= num_classes:
                raise ManifestError(
                    f"{path}:{lineno}: label {label} >= num_classes {num_classes}"
                )
            img = Path(raw[0])
            if not img.is_absolute():
                img = base / img
            if not img.exists():
                raise ManifestError(f"{path}:{lineno}: image not found: {img}")
            rows.append(ManifestRow(path=img, label=label, task_id=task_id))
    if not rows:
        raise ManifestError(f"{path}: manifest has no rows")
    return rows

"""Batched inference over a manifest, written straight to the feature format."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from .backbones import Backbone, build_backbone
from .manifest import ManifestError, ManifestRow, read_manifest
from .writer import write_features


def _load_image(path: Path) -> Image.Image:
    with Image.open(path) as img:
        return img.convert("RGB")


def extract(
    manifest_path: str | Path,
    backbone: str | Backbone,
    output_path: str | Path,
    *,
    weights: str = "pretrained",
    seed: int = 0,
    num_classes: int | None = None,
    batch_size: int = 16,
    on_error: str = "abort",
) -> dict:
    """Run the backbone over every manifest row and write the feature file.

    Features come out in manifest order, one record per row. ``on_error``
    chooses between aborting on an unreadable image and skipping it with a
    warning on stderr. Returns a summary dict (also written as a JSON
    sidecar next to the output) that pins down the backbone, weights mode,
    seed, and preprocessing, so runs are comparable.
    """
    if on_error not in ("abort", "skip"):
        raise ValueError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    rows = read_manifest(manifest_path, num_classes=num_classes)
    if num_classes is None:
        num_classes = max(r.label for r in rows) + 1

    if isinstance(backbone, str):
        backbone = build_backbone(backbone, weights=weights, seed=seed)

    kept: list[ManifestRow] = []
    features: list[np.ndarray] = []
    skipped = 0
    with torch.no_grad():
        for start in range(0, len(rows), batch_size):
            chunk = rows[start : start + batch_size]
            tensors, ok_rows = [], []
            for row in chunk:
                try:
                    tensors.append(backbone.preprocess(_load_image(row.path)))
                    ok_rows.append(row)
                except (OSError, UnidentifiedImageError) as exc:
                    if on_error == "abort":
                        raise ManifestError(f"unreadable image {row.path}: {exc}") from exc
                    skipped += 1
                    print(f"warning: skipping {row.path}: {exc}", file=sys.stderr)
            if not tensors:
                continue
            out = backbone.model(torch.stack(tensors)).cpu().numpy()
            features.extend(np.asarray(v, dtype=np.float32) for v in out)
            kept.extend(ok_rows)

    count = write_features(
        output_path,
        backbone.feature_width,
        num_classes,
        ((row.label, row.task_id, vec) for row, vec in zip(kept, features)),
    )

    summary = {
        "backbone": backbone.name,
        "weights": weights,
        "seed": seed,
        "feature_width": backbone.feature_width,
        "num_classes": num_classes,
        "records": count,
        "skipped": skipped,
        "batch_size": batch_size,
        "preprocess": backbone.preprocess_info,
    }
    sidecar = Path(str(output_path) + ".json")
    with open(sidecar, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary

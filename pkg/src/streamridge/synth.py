"""Desk-scale imbalanced streaming datasets with known class-conditional
Gaussians.

Features for class c are drawn elementwise from N(mean_c, std_c^2), so the
generator's own distribution assumption matches the balancing module's
exactly and any test deviation isolates an implementation bug. Streams are
deterministic per seed; substreams are split as default_rng([seed, 0]) for
the training stream, [seed, 1] for validation, [seed, 2] for preset
parameter draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import InputError
from .features import DatasetHeader, FeatureRecord, write_dataset

# Class proportions shaped like a heavily imbalanced driving stream: the
# dominant class holds 55% and the rarest 0.3%; the middle values just
# interpolate the decay.
DRIVING_IMBALANCE_PROPORTIONS = (0.55, 0.20, 0.12, 0.08, 0.047, 0.003)


@dataclass(frozen=True)
class SynthSpec:
    """Ground truth for one synthetic stream."""

    num_classes: int
    d_feat: int
    num_tasks: int
    samples_per_task: int
    proportions: tuple[float, ...]
    class_means: np.ndarray
    class_stds: np.ndarray
    seed: int

    def __post_init__(self):
        if self.num_classes < 2:
            raise InputError(f"need >= 2 classes, got {self.num_classes}")
        if self.num_tasks < 1 or self.samples_per_task < 1:
            raise InputError("need at least one task with at least one sample")
        if len(self.proportions) != self.num_classes:
            raise InputError(
                f"{len(self.proportions)} proportions for {self.num_classes} classes"
            )
        if abs(sum(self.proportions) - 1.0) > 1e-9:
            raise InputError(f"proportions sum to {sum(self.proportions)}, not 1")
        if min(self.proportions) < 0:
            raise InputError("proportions must be nonnegative")
        if self.class_means.shape != (self.num_classes, self.d_feat):
            raise InputError(
                f"class_means has shape {self.class_means.shape}, "
                f"expected ({self.num_classes}, {self.d_feat})"
            )
        if self.class_stds.shape != (self.num_classes, self.d_feat):
            raise InputError(
                f"class_stds has shape {self.class_stds.shape}, "
                f"expected ({self.num_classes}, {self.d_feat})"
            )
        if not np.all(self.class_stds > 0):
            raise InputError("all class stds must be > 0")


def driving_imbalance_spec(
    d_feat: int = 16,
    samples_per_task: int = 3400,
    num_tasks: int = 6,
    seed: int = 7,
    separation: float = 1.0,
    std_low: float = 0.8,
    std_high: float = 1.3,
) -> SynthSpec:
    """Six-class preset mirroring a 55% / ... / 0.3% imbalance profile.

    Class means are drawn N(0, separation^2) per element and stds uniform in
    [std_low, std_high], all from the [seed, 2] substream, so the whole
    ground truth is pinned by ``seed``.
    """
    rng = np.random.default_rng([seed, 2])
    means = rng.standard_normal((6, d_feat)) * separation
    stds = rng.uniform(std_low, std_high, size=(6, d_feat))
    return SynthSpec(
        num_classes=6,
        d_feat=d_feat,
        num_tasks=num_tasks,
        samples_per_task=samples_per_task,
        proportions=DRIVING_IMBALANCE_PROPORTIONS,
        class_means=means,
        class_stds=stds,
        seed=seed,
    )


def _stream_records(spec: SynthSpec) -> Iterator[FeatureRecord]:
    rng = np.random.default_rng([spec.seed, 0])
    p = np.asarray(spec.proportions)
    for task in range(spec.num_tasks):
        labels = rng.choice(spec.num_classes, size=spec.samples_per_task, p=p)
        noise = rng.standard_normal((spec.samples_per_task, spec.d_feat))
        feats = spec.class_means[labels] + spec.class_stds[labels] * noise
        for label, vec in zip(labels, feats):
            yield FeatureRecord(
                label=int(label), task_id=task, vector=vec.astype(np.float32)
            )


def generate_stream(spec: SynthSpec, path: str | Path) -> DatasetHeader:
    """Write the training stream; task ids are nondecreasing in file order."""
    return write_dataset(path, spec.d_feat, spec.num_classes, _stream_records(spec))


def generate_validation(
    spec: SynthSpec, path: str | Path, per_class: int = 200
) -> DatasetHeader:
    """Write a class-balanced validation set drawn from the same ground truth.

    Equal per-class counts keep per-class accuracy estimates comparably
    tight for rare and common classes alike. All records carry task_id 0.
    """
    if per_class < 1:
        raise InputError(f"per_class must be >= 1, got {per_class}")
    rng = np.random.default_rng([spec.seed, 1])

    def _records() -> Iterator[FeatureRecord]:
        for c in range(spec.num_classes):
            noise = rng.standard_normal((per_class, spec.d_feat))
            feats = spec.class_means[c] + spec.class_stds[c] * noise
            for vec in feats:
                yield FeatureRecord(label=c, task_id=0, vector=vec.astype(np.float32))

    return write_dataset(path, spec.d_feat, spec.num_classes, _records())

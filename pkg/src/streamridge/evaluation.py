"""Class-balanced accuracy accounting.

A validation pass after task t yields one accuracy per class present in the
validation set; their unweighted mean is the task's score, and the average
of those task scores over all tasks so far is the running AMCA. Classes with
no validation samples are excluded from the mean and flagged.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError, UsageError


@dataclass(frozen=True)
class PhaseReport:
    """Per-class accuracies for one validation pass, plus running aggregate."""

    task: int
    per_class_accuracy: dict[int, float]
    per_class_total: dict[int, int]
    excluded_classes: tuple[int, ...]
    mean_class_accuracy: float
    running_amca: float | None = None


def score_task(
    predictions: np.ndarray, truths: np.ndarray, num_classes: int, task: int = 0
) -> PhaseReport:
    """Per-class accuracy over one validation pass.

    Classes absent from ``truths`` are listed in ``excluded_classes`` and do
    not enter the mean.
    """
    predictions = np.asarray(predictions, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if predictions.shape != truths.shape or predictions.ndim != 1:
        raise InputError(
            f"predictions {predictions.shape} and truths {truths.shape} must be equal-length 1-D"
        )
    if truths.size == 0:
        raise InputError("cannot score an empty validation pass")
    if truths.min() < 0 or truths.max() >= num_classes:
        raise InputError(f"truth labels out of range [0, {num_classes})")

    accuracy: dict[int, float] = {}
    totals: dict[int, int] = {}
    excluded: list[int] = []
    for c in range(num_classes):
        mask = truths == c
        total = int(mask.sum())
        if total == 0:
            excluded.append(c)
            continue
        totals[c] = total
        accuracy[c] = float((predictions[mask] == c).sum() / total)
    mean = float(np.mean(list(accuracy.values())))
    return PhaseReport(
        task=task,
        per_class_accuracy=accuracy,
        per_class_total=totals,
        excluded_classes=tuple(excluded),
        mean_class_accuracy=mean,
    )


def amca(task_means: Sequence[float]) -> float:
    """Average of per-task mean class accuracies."""
    if len(task_means) == 0:
        raise UsageError("amca needs at least one task mean")
    return float(np.mean(task_means))


def with_running_amca(reports: Sequence[PhaseReport]) -> list[PhaseReport]:
    """Fill each report's running AMCA from the task means up to it."""
    out = []
    means: list[float] = []
    for rep in reports:
        means.append(rep.mean_class_accuracy)
        out.append(replace(rep, running_amca=amca(means)))
    return out


def write_report_csv(
    path: str | Path, run_id: str, reports: Sequence[PhaseReport]
) -> None:
    """One row per (task, class): run_id,task,class,n_val,accuracy.

    Excluded classes appear with an empty accuracy and n_val = 0 so the flag
    survives into the file.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run_id", "task", "class", "n_val", "accuracy"])
        for rep in reports:
            seen = sorted(rep.per_class_accuracy)
            for c in seen:
                writer.writerow(
                    [run_id, rep.task, c, rep.per_class_total[c], repr(rep.per_class_accuracy[c])]
                )
            for c in rep.excluded_classes:
                writer.writerow([run_id, rep.task, c, 0, ""])


def write_summary_json(
    path: str | Path,
    config_echo: Mapping[str, object],
    reports: Sequence[PhaseReport],
    extras: Mapping[str, object] | None = None,
) -> dict:
    """Summary with config echo, per-task means, and final AMCA.

    Output is deterministic (sorted keys, no timestamps) so identical runs
    produce byte-identical files.
    """
    summary: dict[str, object] = {
        "config": dict(config_echo),
        "tasks": [
            {
                "task": rep.task,
                "mean_class_accuracy": rep.mean_class_accuracy,
                "running_amca": rep.running_amca,
                "per_class_accuracy": {str(k): v for k, v in sorted(rep.per_class_accuracy.items())},
                "excluded_classes": list(rep.excluded_classes),
            }
            for rep in reports
        ],
        "amca": amca([rep.mean_class_accuracy for rep in reports]) if reports else None,
    }
    if extras:
        summary.update(extras)
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary

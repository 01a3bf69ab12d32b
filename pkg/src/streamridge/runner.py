"""Experiment driver: stream a dataset through the pipeline and emit reports.

Streams are cut into phases at task-id boundaries (optionally sub-chunked to
a fixed phase size); validation runs against a held-out set after every task
or after every batch, per configuration. Everything a run produces is a pure
function of its configuration and seeds: reports carry no timestamps, and
the run id is a hash of the effective configuration.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import classifier, evaluation
from .errors import InputError
from .evaluation import PhaseReport
from .features import FeatureRecord, ProjectionBuffer, read_dataset
from .pipeline import (
    PipelineConfig,
    PipelineState,
    Strategy,
    init_pipeline,
    train_batch,
)
from .pseudo import PseudoConfig


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of one training run."""

    dataset: str
    val_dataset: str
    gamma: float = 1.0
    buffer_size: int = 8192
    buffer_seed: int = 0
    buffer_scale: float = 1.0
    alpha: float = 1.0
    pfg_seed: int = 0
    pfg_cap: int | None = None
    strategy: Strategy = Strategy.REBASE
    val_cadence: str = "task"
    phase_size: int | None = None

    def __post_init__(self):
        if self.val_cadence not in ("task", "batch"):
            raise InputError(f"val_cadence must be 'task' or 'batch', got {self.val_cadence!r}")
        if self.buffer_size < 1:
            raise InputError(f"buffer_size must be >= 1, got {self.buffer_size}")
        if self.phase_size is not None and self.phase_size < 1:
            raise InputError(f"phase_size must be >= 1, got {self.phase_size}")

    def echo(self) -> dict:
        """JSON-safe dump of every effective setting."""
        return {
            "dataset": str(self.dataset),
            "val_dataset": str(self.val_dataset),
            "gamma": self.gamma,
            "buffer_size": self.buffer_size,
            "buffer_seed": self.buffer_seed,
            "buffer_scale": self.buffer_scale,
            "alpha": self.alpha,
            "pfg_seed": self.pfg_seed,
            "pfg_cap": self.pfg_cap,
            "strategy": self.strategy.value,
            "val_cadence": self.val_cadence,
            "phase_size": self.phase_size,
        }

    def run_id(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class RunResult:
    run_id: str
    config: RunConfig
    reports: list[PhaseReport]
    iterative_reports: list[PhaseReport]
    pseudo_rows_per_phase: list[int] = field(default_factory=list)
    final_state: PipelineState | None = None

    @property
    def amca(self) -> float:
        return evaluation.amca([r.mean_class_accuracy for r in self.reports])

    @property
    def iterative_amca(self) -> float:
        return evaluation.amca(
            [r.mean_class_accuracy for r in self.iterative_reports]
        )

    @property
    def pseudo_rows_total(self) -> int:
        return int(sum(self.pseudo_rows_per_phase))


def split_phases(
    records: Iterable[FeatureRecord], phase_size: int | None = None
) -> list[tuple[int, list[FeatureRecord]]]:
    """Cut a record stream into (task_id, batch) phases.

    A new phase starts whenever the task id changes; with ``phase_size`` set,
    tasks are additionally sub-chunked into batches of at most that size.
    """
    phases: list[tuple[int, list[FeatureRecord]]] = []
    current: list[FeatureRecord] = []
    current_task: int | None = None
    for rec in records:
        boundary = current_task is not None and rec.task_id != current_task
        full = phase_size is not None and len(current) >= phase_size
        if current and (boundary or full):
            phases.append((current_task, current))
            current = []
        current_task = rec.task_id
        current.append(rec)
    if current:
        phases.append((current_task, current))
    return phases


def run_experiment(
    config: RunConfig, out_dir: str | Path | None = None, keep_state: bool = False
) -> RunResult:
    """Train over the configured stream, validating per the chosen cadence.

    Writes ``report.csv`` and ``summary.json`` into ``out_dir`` when given.
    The CSV scores the balanced (inference) classifier; the summary also
    carries the iterative classifier's scores for strategy comparisons.
    """
    train_header, train_iter = read_dataset(config.dataset)
    val_header, val_iter = read_dataset(config.val_dataset)
    if val_header.d_feat != train_header.d_feat:
        raise InputError(
            f"validation d_feat {val_header.d_feat} != training d_feat {train_header.d_feat}"
        )
    if val_header.num_classes != train_header.num_classes:
        raise InputError(
            f"validation classes {val_header.num_classes} != training classes {train_header.num_classes}"
        )

    val_records = list(val_iter)
    val_truth = np.array([rec.label for rec in val_records], dtype=np.int64)
    val_feats = np.stack([rec.vector for rec in val_records]).astype(np.float64)

    buf = ProjectionBuffer(
        train_header.d_feat, config.buffer_size, config.buffer_seed, config.buffer_scale
    )
    state = init_pipeline(
        buf,
        train_header.num_classes,
        PipelineConfig(
            gamma=config.gamma,
            pseudo=PseudoConfig(
                alpha=config.alpha, seed=config.pfg_seed, cap=config.pfg_cap
            ),
            strategy=config.strategy,
        ),
    )
    val_X = buf.project(val_feats)

    phases = split_phases(train_iter, config.phase_size)
    reports: list[PhaseReport] = []
    iterative_reports: list[PhaseReport] = []
    pseudo_rows: list[int] = []
    for i, (task_id, batch) in enumerate(phases):
        state = train_batch(state, batch)
        pseudo_rows.append(int(state.last_pseudo_counts.sum()))
        last_of_task = i + 1 == len(phases) or phases[i + 1][0] != task_id
        if config.val_cadence == "batch" or last_of_task:
            tag = i if config.val_cadence == "batch" else task_id
            pred_bal = classifier.predict(state.balanced, val_X)
            pred_it = classifier.predict(state.iterative, val_X)
            reports.append(
                evaluation.score_task(pred_bal, val_truth, train_header.num_classes, task=tag)
            )
            iterative_reports.append(
                evaluation.score_task(pred_it, val_truth, train_header.num_classes, task=tag)
            )

    reports = evaluation.with_running_amca(reports)
    iterative_reports = evaluation.with_running_amca(iterative_reports)
    result = RunResult(
        run_id=config.run_id(),
        config=config,
        reports=reports,
        iterative_reports=iterative_reports,
        pseudo_rows_per_phase=pseudo_rows,
        final_state=state if keep_state else None,
    )
    if out_dir is not None:
        write_run_outputs(result, out_dir)
    return result


def write_run_outputs(result: RunResult, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.csv"
    summary_path = out_dir / "summary.json"
    evaluation.write_report_csv(report_path, result.run_id, result.reports)
    evaluation.write_summary_json(
        summary_path,
        result.config.echo(),
        result.reports,
        extras={
            "run_id": result.run_id,
            "pseudo_rows_per_phase": result.pseudo_rows_per_phase,
            "pseudo_rows_total": result.pseudo_rows_total,
            "cap_active": result.config.pfg_cap is not None,
            "iterative": {
                "amca": result.iterative_amca,
                "tasks": [
                    {"task": r.task, "mean_class_accuracy": r.mean_class_accuracy}
                    for r in result.iterative_reports
                ],
            },
        },
    )
    return report_path, summary_path


def sweep(
    base: RunConfig,
    out_dir: str | Path,
    alphas: Sequence[float] | None = None,
    gammas: Sequence[float] | None = None,
    strategies: Sequence[Strategy] | None = None,
) -> list[RunResult]:
    """Cross-product ablation over alpha, gamma, and strategy.

    Each combination runs independently into ``out_dir/runs/<run_id>/``; the
    top-level ``sweep.csv`` tabulates one row per run.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    alphas = list(alphas) if alphas is not None else [base.alpha]
    gammas = list(gammas) if gammas is not None else [base.gamma]
    strategies = list(strategies) if strategies is not None else [base.strategy]

    results = []
    for strategy in strategies:
        for gamma in gammas:
            for alpha in alphas:
                cfg = replace(base, alpha=alpha, gamma=gamma, strategy=strategy)
                results.append(run_experiment(cfg, out_dir / "runs" / cfg.run_id()))

    with open(out_dir / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["run_id", "strategy", "gamma", "alpha", "amca", "iterative_amca"]
        )
        for res in results:
            writer.writerow(
                [
                    res.run_id,
                    res.config.strategy.value,
                    repr(res.config.gamma),
                    repr(res.config.alpha),
                    repr(res.amca),
                    repr(res.iterative_amca),
                ]
            )
    return results


def dataset_info(path: str | Path) -> dict:
    """Header echo plus per-class and per-task record counts."""
    header, records = read_dataset(path)
    class_counts = dict.fromkeys(range(header.num_classes), 0)
    task_counts: dict[int, int] = {}
    for rec in records:
        class_counts[rec.label] += 1
        task_counts[rec.task_id] = task_counts.get(rec.task_id, 0) + 1
    return {
        "d_feat": header.d_feat,
        "num_classes": header.num_classes,
        "num_records": header.num_records,
        "version": header.version,
        "class_counts": {str(c): n for c, n in class_counts.items()},
        "task_counts": {str(t): task_counts[t] for t in sorted(task_counts)},
    }


def feature_histograms(
    path: str | Path,
    class_index: int,
    elements: Sequence[int],
    bins: int = 30,
) -> list[dict]:
    """Binned counts plus fitted (mu, sigma) for chosen feature elements.

    Rows are plot-ready: element, bin_left, bin_right, count, mu, sigma.
    """
    if not elements:
        raise InputError("no feature elements selected")
    header, records = read_dataset(path)
    if not 0 <= class_index < header.num_classes:
        raise InputError(
            f"class {class_index} out of range [0, {header.num_classes})"
        )
    for el in elements:
        if not 0 <= el < header.d_feat:
            raise InputError(f"element {el} out of range [0, {header.d_feat})")

    vecs = [rec.vector for rec in records if rec.label == class_index]
    if not vecs:
        raise InputError(f"class {class_index} has no records in {path}")
    mat = np.stack(vecs).astype(np.float64)

    rows = []
    for el in elements:
        col = mat[:, el]
        mu = float(col.mean())
        sigma = float(col.std(ddof=1)) if col.size > 1 else 0.0
        counts, edges = np.histogram(col, bins=bins)
        for b in range(bins):
            rows.append(
                {
                    "element": el,
                    "bin_left": float(edges[b]),
                    "bin_right": float(edges[b + 1]),
                    "count": int(counts[b]),
                    "mu": mu,
                    "sigma": sigma,
                }
            )
    return rows


def write_histogram_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["element", "bin_left", "bin_right", "count", "mu", "sigma"])
        for row in rows:
            writer.writerow(
                [
                    row["element"],
                    repr(row["bin_left"]),
                    repr(row["bin_right"]),
                    row["count"],
                    repr(row["mu"]),
                    repr(row["sigma"]),
                ]
            )

"""Streaming exemplar-free ridge-regression continual learner.

Trains a ridge classifier over pre-extracted feature vectors through
recursive analytic updates that exactly reproduce the joint closed-form
solution, tracks per-class feature moments online, and compensates class
imbalance by regenerating distribution-matched pseudo-features for an
inference-time balanced classifier.
"""

from .classifier import RidgeState, joint_fit, predict, update
from .errors import (
    FormatError,
    InputError,
    NumericalError,
    StreamRidgeError,
    UsageError,
)
from .evaluation import PhaseReport, amca, score_task
from .features import (
    DatasetHeader,
    FeatureRecord,
    ProjectionBuffer,
    one_hot,
    project,
    read_csv_dataset,
    read_dataset,
    write_dataset,
)
from .pipeline import (
    PipelineConfig,
    PipelineState,
    Strategy,
    infer,
    init_pipeline,
    load_pipeline,
    save_pipeline,
    train_batch,
)
from .pseudo import PseudoBatch, PseudoConfig, generate
from .runner import RunConfig, RunResult, run_experiment, sweep
from .stats import ClassStats
from .synth import SynthSpec, generate_stream, generate_validation, driving_imbalance_spec

__version__ = "0.1.0"

__all__ = [
    "RidgeState",
    "joint_fit",
    "predict",
    "update",
    "StreamRidgeError",
    "InputError",
    "FormatError",
    "NumericalError",
    "UsageError",
    "PhaseReport",
    "amca",
    "score_task",
    "DatasetHeader",
    "FeatureRecord",
    "ProjectionBuffer",
    "one_hot",
    "project",
    "read_csv_dataset",
    "read_dataset",
    "write_dataset",
    "PipelineConfig",
    "PipelineState",
    "Strategy",
    "infer",
    "init_pipeline",
    "load_pipeline",
    "save_pipeline",
    "train_batch",
    "PseudoBatch",
    "PseudoConfig",
    "generate",
    "RunConfig",
    "RunResult",
    "run_experiment",
    "sweep",
    "ClassStats",
    "SynthSpec",
    "generate_stream",
    "generate_validation",
    "driving_imbalance_spec",
]

"""Per-batch orchestration of the streaming learner.

Each call to :func:`train_batch` is one phase: project the arriving records,
fold them into the per-class moments and the iterative classifier, generate
the balancing pseudo-batch from the updated moments, and derive the balanced
classifier used for inference. Under the default REBASE strategy the
balanced state is rebuilt from the iterative state every phase, so
pseudo-features never leak into subsequent learning; CARRY instead keeps
updating the previous balanced state and exists to reproduce the strategy
ablation.

State is a value: every step builds new objects and a failed step leaves the
caller's state untouched. Nothing in the state grows with the stream -
weights, the autocorrelation inverse, per-class moments, and the buffer
parameters are its only contents.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from . import classifier
from .classifier import RidgeState
from .errors import FormatError, InputError, UsageError
from .features import FeatureRecord, ProjectionBuffer, one_hot_matrix
from .pseudo import PseudoConfig, generate
from .stats import ClassStats


class Strategy(Enum):
    """How the balanced classifier is derived each phase."""

    REBASE = "rebase"
    CARRY = "carry"


@dataclass(frozen=True)
class PipelineConfig:
    gamma: float = 1.0
    pseudo: PseudoConfig = PseudoConfig()
    strategy: Strategy = Strategy.REBASE


@dataclass(frozen=True)
class PipelineState:
    """Complete learner memory between phases; fixed size regardless of stream length."""

    iterative: RidgeState
    balanced: RidgeState
    stats: ClassStats
    buf: ProjectionBuffer
    config: PipelineConfig
    phase: int
    last_pseudo_counts: np.ndarray


def init_pipeline(
    buf: ProjectionBuffer, num_classes: int, config: PipelineConfig
) -> PipelineState:
    fresh = RidgeState.fresh(buf.d_buf, num_classes, config.gamma)
    return PipelineState(
        iterative=fresh,
        balanced=fresh,
        stats=ClassStats(num_classes, buf.d_feat).snapshot(),
        buf=buf,
        config=config,
        phase=0,
        last_pseudo_counts=np.zeros(num_classes, dtype=np.int64),
    )


def _gather(
    state: PipelineState, records: Sequence[FeatureRecord]
) -> tuple[np.ndarray, np.ndarray]:
    """Stack record vectors and labels, validating against the state's dims."""
    num_classes = state.iterative.num_classes
    feats = np.zeros((len(records), state.buf.d_feat), dtype=np.float64)
    labels = np.zeros(len(records), dtype=np.int64)
    for i, rec in enumerate(records):
        vec = np.asarray(rec.vector, dtype=np.float64)
        if vec.shape != (state.buf.d_feat,):
            raise InputError(
                f"record {i}: vector shape {vec.shape}, expected ({state.buf.d_feat},)"
            )
        if not 0 <= rec.label < num_classes:
            raise InputError(
                f"record {i}: label {rec.label} out of range [0, {num_classes})"
            )
        if not np.all(np.isfinite(vec)):
            raise InputError(f"record {i}: non-finite feature values")
        feats[i] = vec
        labels[i] = rec.label
    return feats, labels


def train_batch(
    state: PipelineState, records: Sequence[FeatureRecord]
) -> PipelineState:
    """Run one phase over ``records`` and return the successor state."""
    feats, labels = _gather(state, records)
    X = state.buf.project(feats)
    Y = one_hot_matrix(labels, state.iterative.num_classes)

    stats = state.stats.copy()
    for f, label in zip(feats, labels):
        stats.observe(int(label), f)
    stats = stats.snapshot()

    iterative = classifier.update(state.iterative, X, Y)

    pseudo = generate(stats, state.buf, state.config.pseudo, phase=state.phase)
    if state.config.strategy is Strategy.REBASE:
        balanced = classifier.update(iterative, pseudo.X, pseudo.Y)
    else:
        balanced = classifier.update(state.balanced, X, Y)
        balanced = classifier.update(balanced, pseudo.X, pseudo.Y)

    return PipelineState(
        iterative=iterative,
        balanced=balanced,
        stats=stats,
        buf=state.buf,
        config=state.config,
        phase=state.phase + 1,
        last_pseudo_counts=pseudo.counts,
    )


def infer(state: PipelineState, records: Sequence[FeatureRecord]) -> np.ndarray:
    """Predict labels with the balanced classifier; side-effect free."""
    if state.phase == 0:
        raise UsageError("pipeline has not trained on any batch yet")
    feats = _gather_features_only(state, records)
    return classifier.predict(state.balanced, state.buf.project(feats))


def _gather_features_only(
    state: PipelineState, records: Sequence[FeatureRecord]
) -> np.ndarray:
    feats = np.zeros((len(records), state.buf.d_feat), dtype=np.float64)
    for i, rec in enumerate(records):
        vec = np.asarray(rec.vector, dtype=np.float64)
        if vec.shape != (state.buf.d_feat,):
            raise InputError(
                f"record {i}: vector shape {vec.shape}, expected ({state.buf.d_feat},)"
            )
        feats[i] = vec
    return feats


# ---------------------------------------------------------------------------
# Checkpointing. Layout (little-endian), documented field by field:
#
#   magic b"SRPL" | u32 version | u32 phase | u8 strategy (0 rebase, 1 carry)
#   | u8 has_cap | 6 pad bytes | f64 gamma | f64 alpha | u64 pseudo_seed
#   | i64 cap | u32 d_feat | u32 d_buf | u64 buffer_seed | f64 buffer_scale
#   | u32 num_classes | 4 pad bytes
#   | per-class counts (C i64) | mu (C*d_feat f64) | nu (C*d_feat f64)
#   | last pseudo counts (C i64)
#   | iterative W (d_buf*C f64) | iterative R (d_buf^2 f64)
#   | balanced  W (d_buf*C f64) | balanced  R (d_buf^2 f64)
#
# Buffer weights are not stored; they are regenerated bit-identically from
# (buffer_seed, d_feat, d_buf, scale). Total size is a function of the
# dimensions only, never of how many samples the pipeline has consumed.
# ---------------------------------------------------------------------------

_PIPE_MAGIC = b"SRPL"
_PIPE_VERSION = 1
_PIPE_STRUCT = struct.Struct("<4sIIBB6xddQqIIQdI4x")


def save_pipeline(state: PipelineState, path: str | Path) -> None:
    cfg = state.config
    cap = cfg.pseudo.cap if cfg.pseudo.cap is not None else -1
    with open(path, "wb") as fh:
        fh.write(
            _PIPE_STRUCT.pack(
                _PIPE_MAGIC,
                _PIPE_VERSION,
                state.phase,
                0 if cfg.strategy is Strategy.REBASE else 1,
                0 if cfg.pseudo.cap is None else 1,
                cfg.gamma,
                cfg.pseudo.alpha,
                cfg.pseudo.seed,
                cap,
                state.buf.d_feat,
                state.buf.d_buf,
                state.buf.seed,
                state.buf.scale,
                state.stats.num_classes,
            )
        )
        fh.write(np.ascontiguousarray(state.stats.n, dtype="<i8").tobytes())
        fh.write(np.ascontiguousarray(state.stats.mu, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.stats.nu, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.last_pseudo_counts, dtype="<i8").tobytes())
        for st in (state.iterative, state.balanced):
            fh.write(np.ascontiguousarray(st.W, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(st.R, dtype="<f8").tobytes())


def load_pipeline(path: str | Path) -> PipelineState:
    with open(path, "rb") as fh:
        raw = fh.read(_PIPE_STRUCT.size)
        if len(raw) < _PIPE_STRUCT.size:
            raise FormatError(f"{path}: file too short for header", offset=len(raw))
        (
            magic,
            version,
            phase,
            strategy_code,
            has_cap,
            gamma,
            alpha,
            pseudo_seed,
            cap,
            d_feat,
            d_buf,
            buffer_seed,
            buffer_scale,
            num_classes,
        ) = _PIPE_STRUCT.unpack(raw)
        if magic != _PIPE_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}", offset=0)
        if version != _PIPE_VERSION:
            raise FormatError(f"{path}: unsupported version {version}", offset=4)
        payload = fh.read()

    counts_b = 8 * num_classes
    mom_b = 8 * num_classes * d_feat
    w_b = 8 * d_buf * num_classes
    r_b = 8 * d_buf * d_buf
    expected = 2 * counts_b + 2 * mom_b + 2 * (w_b + r_b)
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}",
            offset=_PIPE_STRUCT.size,
        )

    pos = 0

    def take(nbytes: int) -> bytes:
        nonlocal pos
        chunk = payload[pos : pos + nbytes]
        pos += nbytes
        return chunk

    stats = ClassStats(num_classes, d_feat)
    stats.n = np.frombuffer(take(counts_b), dtype="<i8").copy()
    stats.mu = np.frombuffer(take(mom_b), dtype="<f8").reshape(num_classes, d_feat).copy()
    stats.nu = np.frombuffer(take(mom_b), dtype="<f8").reshape(num_classes, d_feat).copy()
    last_counts = np.frombuffer(take(counts_b), dtype="<i8").copy()

    states = []
    for _ in range(2):
        W = np.frombuffer(take(w_b), dtype="<f8").reshape(d_buf, num_classes).copy()
        R = np.frombuffer(take(r_b), dtype="<f8").reshape(d_buf, d_buf).copy()
        W.setflags(write=False)
        R.setflags(write=False)
        states.append(RidgeState(W=W, R=R, gamma=gamma))

    config = PipelineConfig(
        gamma=gamma,
        pseudo=PseudoConfig(
            alpha=alpha, seed=pseudo_seed, cap=cap if has_cap else None
        ),
        strategy=Strategy.REBASE if strategy_code == 0 else Strategy.CARRY,
    )
    buf = ProjectionBuffer(d_feat, d_buf, buffer_seed, buffer_scale)
    return PipelineState(
        iterative=states[0],
        balanced=states[1],
        stats=stats.snapshot(),
        buf=buf,
        config=config,
        phase=phase,
        last_pseudo_counts=last_counts,
    )

"""Pseudo-feature generation for class balancing.

Every class's sample count is offset to the current maximum by drawing
synthetic raw features from the per-class normal estimate N(mu, (alpha *
sigma)^2), elementwise independent, then projecting them like real samples.
Classes with fewer than 2 real samples have no std estimate and are skipped.

Draws use numpy's PCG64 via ``default_rng([seed, phase, class])``, one
substream per class, so output is bit-reproducible and independent of any
internal parallelization or class visit order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InputError
from .features import ProjectionBuffer, one_hot_matrix
from .stats import ClassStats


@dataclass(frozen=True)
class PseudoConfig:
    """Sampling knobs: noise coefficient, RNG seed, optional per-class cap."""

    alpha: float = 1.0
    seed: int = 0
    cap: int | None = None

    def __post_init__(self):
        if self.alpha < 0:
            raise InputError(f"alpha must be >= 0, got {self.alpha}")
        if self.cap is not None and self.cap < 0:
            raise InputError(f"cap must be >= 0, got {self.cap}")


@dataclass(frozen=True)
class PseudoBatch:
    """Projected pseudo-features with one-hot targets and per-class counts."""

    X: np.ndarray
    Y: np.ndarray
    counts: np.ndarray

    @property
    def num_rows(self) -> int:
        return self.X.shape[0]


def raw_pseudo_features(
    stats: ClassStats, config: PseudoConfig, *, phase: int = 0
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (class, raw feature block) pairs in class order, pre-projection.

    For each class c with at least 2 observed samples, the block holds
    ``min(n_max - n_c, cap)`` rows drawn i.i.d. elementwise from
    N(mu_c, (alpha * sigma_c)^2); classes needing no offset yield nothing.
    With alpha = 0 every row equals mu_c exactly.
    """
    n_max = int(stats.n.max()) if stats.num_classes else 0
    for c in range(stats.num_classes):
        n_c = stats.count(c)
        if n_c < 2:
            continue
        m_c = n_max - n_c
        if config.cap is not None:
            m_c = min(m_c, config.cap)
        if m_c <= 0:
            continue
        rng = np.random.default_rng([config.seed, phase, c])
        yield c, rng.normal(
            loc=stats.mu[c],
            scale=config.alpha * stats.std(c),
            size=(m_c, stats.d_feat),
        )


def generate(
    stats: ClassStats,
    buf: ProjectionBuffer,
    config: PseudoConfig,
    *,
    phase: int = 0,
) -> PseudoBatch:
    """Build the projected pseudo-batch that offsets counts to the max class.

    ``phase`` selects an independent noise substream so successive pipeline
    phases do not reuse draws; everything is deterministic given
    (stats, seed, alpha, phase). An empty batch is a valid result.
    """
    if stats.d_feat != buf.d_feat:
        raise InputError(
            f"stats track d_feat={stats.d_feat}, buffer expects {buf.d_feat}"
        )
    blocks_x: list[np.ndarray] = []
    labels: list[int] = []
    counts = np.zeros(stats.num_classes, dtype=np.int64)
    for c, raw in raw_pseudo_features(stats, config, phase=phase):
        blocks_x.append(buf.project(raw))
        labels.extend([c] * raw.shape[0])
        counts[c] = raw.shape[0]

    if blocks_x:
        X = np.concatenate(blocks_x, axis=0)
    else:
        X = np.zeros((0, buf.d_buf), dtype=np.float64)
    Y = one_hot_matrix(labels, stats.num_classes)
    return PseudoBatch(X=X, Y=Y, counts=counts)

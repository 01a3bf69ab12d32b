"""Recursive ridge-regression classifier over projected features.

The classifier keeps two matrices: the weight ``W`` (d x C) and the inverse
``R`` (d x d) of the regularized feature autocorrelation ``sum(X_i^T X_i) +
gamma * I``. Feeding a batch ``(X, Y)`` through :func:`update` applies a
rank-n inverse update to ``R`` and folds the batch into ``W``; the result is
identical (up to floating point) to refitting the closed form on all rows
seen so far, which :func:`joint_fit` computes directly and which the tests
use as the oracle.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import FormatError, InputError, NumericalError

# Rows per inverse-update step. Splitting a batch into consecutive blocks
# yields the same state (that is the whole point of the recursion) while
# keeping the inner n x n solve bounded.
_UPDATE_BLOCK = 1024

_CKPT_MAGIC = b"RCLS"
_CKPT_VERSION = 1
_CKPT_STRUCT = struct.Struct("<4sIIId")


@dataclass(frozen=True)
class RidgeState:
    """Immutable classifier state: weights, autocorrelation inverse, ridge weight."""

    W: np.ndarray
    R: np.ndarray
    gamma: float

    @property
    def d(self) -> int:
        return self.W.shape[0]

    @property
    def num_classes(self) -> int:
        return self.W.shape[1]

    @classmethod
    def fresh(cls, d: int, num_classes: int, gamma: float) -> "RidgeState":
        """Untrained state: W = 0, R = I / gamma."""
        if gamma <= 0:
            raise InputError(f"gamma must be > 0, got {gamma}")
        if d < 1 or num_classes < 1:
            raise InputError(f"invalid dims d={d}, num_classes={num_classes}")
        W = np.zeros((d, num_classes), dtype=np.float64)
        R = np.eye(d, dtype=np.float64) / gamma
        return cls(W=_frozen(W), R=_frozen(R), gamma=float(gamma))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_batch(state: RidgeState, X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise InputError(f"X and Y must be 2-D, got shapes {X.shape}, {Y.shape}")
    if X.shape[0] != Y.shape[0]:
        raise InputError(f"row mismatch: X has {X.shape[0]}, Y has {Y.shape[0]}")
    if X.shape[1] != state.d:
        raise InputError(f"X has {X.shape[1]} columns, state expects {state.d}")
    if Y.shape[1] != state.num_classes:
        raise InputError(
            f"Y has {Y.shape[1]} columns, state expects {state.num_classes}"
        )
    if X.size and not np.all(np.isfinite(X)):
        raise InputError("X contains non-finite entries")
    if Y.size and not np.all(np.isfinite(Y)):
        raise InputError("Y contains non-finite entries")
    return X, Y


def update(state: RidgeState, X: np.ndarray, Y: np.ndarray) -> RidgeState:
    """Fold one batch into the state; pure, returns a new state.

    R_k = R - R X^T (I_n + X R X^T)^-1 X R
    W_k = W + R_k X^T (Y - X W)

    The n x n system is solved by Cholesky factorization; it is symmetric
    positive-definite whenever R is, so a factorization failure signals a
    corrupted state and raises NumericalError.
    """
    X, Y = _check_batch(state, X, Y)
    n = X.shape[0]
    if n == 0:
        return state

    R = state.R
    W = state.W
    for start in range(0, n, _UPDATE_BLOCK):
        Xb = X[start : start + _UPDATE_BLOCK]
        Yb = Y[start : start + _UPDATE_BLOCK]
        G = Xb @ R
        S = G @ Xb.T
        S[np.diag_indices_from(S)] += 1.0
        try:
            factor = cho_factor(S, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"failed to factor (I + X R X^T) for a block of {Xb.shape[0]} rows: {exc}"
            ) from exc
        R = R - G.T @ cho_solve(factor, G, check_finite=False)
        R = (R + R.T) / 2.0
        W = W + R @ (Xb.T @ (Yb - Xb @ W))
    return RidgeState(W=_frozen(W), R=_frozen(R), gamma=state.gamma)


def joint_fit(X: np.ndarray, Y: np.ndarray, gamma: float) -> RidgeState:
    """Closed-form batch solution over all rows at once.

    W = (X^T X + gamma I)^-1 X^T Y, with R the explicit inverse. Serves as
    the independent reference the recursive path must reproduce.
    """
    if gamma <= 0:
        raise InputError(f"gamma must be > 0, got {gamma}")
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise InputError(f"X and Y must be 2-D, got shapes {X.shape}, {Y.shape}")
    if X.shape[0] != Y.shape[0]:
        raise InputError(f"row mismatch: X has {X.shape[0]}, Y has {Y.shape[0]}")
    if X.size and not np.all(np.isfinite(X)):
        raise InputError("X contains non-finite entries")
    if Y.size and not np.all(np.isfinite(Y)):
        raise InputError("Y contains non-finite entries")

    d = X.shape[1]
    A = X.T @ X
    A[np.diag_indices_from(A)] += gamma
    try:
        factor = cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"failed to factor X^T X + gamma I: {exc}") from exc
    R = cho_solve(factor, np.eye(d), check_finite=False)
    R = (R + R.T) / 2.0
    W = cho_solve(factor, X.T @ Y, check_finite=False)
    return RidgeState(W=_frozen(W), R=_frozen(R), gamma=float(gamma))


def predict(state: RidgeState, X: np.ndarray) -> np.ndarray:
    """Class labels as argmax over the C regression outputs; ties go to the
    lowest class index."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != state.d:
        raise InputError(f"X has shape {X.shape}, state expects (n, {state.d})")
    return np.argmax(X @ state.W, axis=1)


def scores(state: RidgeState, X: np.ndarray) -> np.ndarray:
    """Raw regression outputs X @ W (n x C)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != state.d:
        raise InputError(f"X has shape {X.shape}, state expects (n, {state.d})")
    return X @ state.W


def save_state(state: RidgeState, path: str | Path) -> None:
    """Checkpoint layout: magic b"RCLS" | u32 version | u32 d | u32 C |
    f64 gamma | W (d*C f64, row-major) | R (d*d f64, row-major), little-endian."""
    with open(path, "wb") as fh:
        fh.write(
            _CKPT_STRUCT.pack(
                _CKPT_MAGIC, _CKPT_VERSION, state.d, state.num_classes, state.gamma
            )
        )
        fh.write(np.ascontiguousarray(state.W, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.R, dtype="<f8").tobytes())


def load_state(path: str | Path) -> RidgeState:
    with open(path, "rb") as fh:
        raw = fh.read(_CKPT_STRUCT.size)
        if len(raw) < _CKPT_STRUCT.size:
            raise FormatError(f"{path}: file too short for header", offset=len(raw))
        magic, version, d, num_classes, gamma = _CKPT_STRUCT.unpack(raw)
        if magic != _CKPT_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}", offset=0)
        if version != _CKPT_VERSION:
            raise FormatError(f"{path}: unsupported version {version}", offset=4)
        w_bytes = 8 * d * num_classes
        r_bytes = 8 * d * d
        payload = fh.read(w_bytes + r_bytes)
    if len(payload) < w_bytes + r_bytes:
        raise FormatError(
            f"{path}: truncated matrix payload", offset=_CKPT_STRUCT.size + len(payload)
        )
    W = np.frombuffer(payload[:w_bytes], dtype="<f8").reshape(d, num_classes).copy()
    R = np.frombuffer(payload[w_bytes:], dtype="<f8").reshape(d, d).copy()
    return RidgeState(W=_frozen(W), R=_frozen(R), gamma=gamma)

"""Per-class streaming estimates of feature mean, mean-square, and std.

Moments are tracked on raw backbone features (pre-projection), one running
(mu, nu) pair per class, updated one sample at a time:

    mu  <- f   / n + (n - 1) / n * mu
    nu  <- f^2 / n + (n - 1) / n * nu
    sigma = sqrt( n / (n - 1) * (nu - mu^2) )     for n >= 2

Counts reflect real samples only; pseudo-features must never be observed.
All accumulation is in 64-bit floats.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import InputError, UsageError


class ClassStats:
    """Running per-class sample count, mean, and mean-of-squares."""

    def __init__(self, num_classes: int, d_feat: int):
        if num_classes < 1 or d_feat < 1:
            raise InputError(
                f"invalid dims num_classes={num_classes}, d_feat={d_feat}"
            )
        self.num_classes = num_classes
        self.d_feat = d_feat
        self.n = np.zeros(num_classes, dtype=np.int64)
        self.mu = np.zeros((num_classes, d_feat), dtype=np.float64)
        self.nu = np.zeros((num_classes, d_feat), dtype=np.float64)
        self._frozen = False

    def observe(self, label: int, f: np.ndarray) -> None:
        """Fold one real sample of class ``label`` into the running moments."""
        if self._frozen:
            raise UsageError("cannot observe into a frozen snapshot")
        if not 0 <= label < self.num_classes:
            raise InputError(f"label {label} out of range [0, {self.num_classes})")
        f = np.asarray(f, dtype=np.float64)
        if f.shape != (self.d_feat,):
            raise InputError(f"feature has shape {f.shape}, expected ({self.d_feat},)")
        if not np.all(np.isfinite(f)):
            raise InputError("feature contains non-finite entries")
        self.n[label] += 1
        n = self.n[label]
        self.mu[label] = f / n + (n - 1) / n * self.mu[label]
        self.nu[label] = f * f / n + (n - 1) / n * self.nu[label]

    def count(self, label: int) -> int:
        return int(self.n[label])

    def mean(self, label: int) -> np.ndarray:
        if self.n[label] < 1:
            raise UsageError(f"class {label} has no samples")
        return self.mu[label].copy()

    def mean_square(self, label: int) -> np.ndarray:
        if self.n[label] < 1:
            raise UsageError(f"class {label} has no samples")
        return self.nu[label].copy()

    def std(self, label: int) -> np.ndarray:
        """Sample standard deviation; defined only once a class has >= 2 samples.

        Tiny negative radicands from floating-point cancellation are clamped
        to zero.
        """
        n = self.n[label]
        if n < 2:
            raise UsageError(f"class {label} has {n} samples, std needs >= 2")
        var = n / (n - 1) * (self.nu[label] - self.mu[label] ** 2)
        return np.sqrt(np.maximum(var, 0.0))

    def copy(self) -> "ClassStats":
        """Writable deep copy; used for atomic per-batch updates."""
        out = ClassStats(self.num_classes, self.d_feat)
        out.n = self.n.copy()
        out.mu = self.mu.copy()
        out.nu = self.nu.copy()
        return out

    def snapshot(self) -> "ClassStats":
        """Immutable deep copy, unaffected by subsequent observes."""
        out = self.copy()
        out.n.setflags(write=False)
        out.mu.setflags(write=False)
        out.nu.setflags(write=False)
        out._frozen = True
        return out

    def export_csv(self, path: str | Path) -> None:
        """Long-format dump for distribution diagnostics.

        One row per (class, element): class,element,n,mu,nu,sigma. The sigma
        column is empty for classes with fewer than 2 samples.
        """
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["class", "element", "n", "mu", "nu", "sigma"])
            for c in range(self.num_classes):
                n = int(self.n[c])
                sigma = self.std(c) if n >= 2 else None
                for j in range(self.d_feat):
                    writer.writerow(
                        [
                            c,
                            j,
                            n,
                            repr(float(self.mu[c, j])),
                            repr(float(self.nu[c, j])),
                            repr(float(sigma[j])) if sigma is not None else "",
                        ]
                    )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassStats):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.d_feat == other.d_feat
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.nu, other.nu)
        )

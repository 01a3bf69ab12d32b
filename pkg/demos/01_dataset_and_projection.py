#!/usr/bin/env python3
"""Feature records on disk, and the frozen random projection.

Walks through the binary dataset format (write, inspect, stream back) and
shows how a buffer lifts raw features into the rectified high-dimensional
space the classifier trains on.
"""

import tempfile
from pathlib import Path

import numpy as np

from streamridge import FeatureRecord, ProjectionBuffer, read_dataset, write_dataset
from streamridge.features import read_header

rng = np.random.default_rng(0)
workdir = Path(tempfile.mkdtemp())

# Three labeled feature vectors, two classes, two tasks.
records = [
    FeatureRecord(label=0, task_id=0, vector=rng.standard_normal(8).astype(np.float32)),
    FeatureRecord(label=1, task_id=0, vector=rng.standard_normal(8).astype(np.float32)),
    FeatureRecord(label=1, task_id=1, vector=rng.standard_normal(8).astype(np.float32)),
]

path = workdir / "toy.feat"
header = write_dataset(path, d_feat=8, num_classes=2, records=records)
print(f"wrote {path} -> {header}")
print(f"file is {path.stat().st_size} bytes "
      f"(24-byte header + 3 x (8 + 4*8) record bytes)")

# The header is readable on its own; records stream lazily.
print("header readback:", read_header(path))
_, stream = read_dataset(path)
for rec in stream:
    print(f"  label={rec.label} task={rec.task_id} f[:3]={rec.vector[:3]}")

# Projection: a frozen random linear map followed by max(0, .).
buf = ProjectionBuffer(d_feat=8, d_buf=32, seed=42)
x = buf.project(records[0].vector)
print(f"\nprojected width: {x.shape[0]}, negatives clipped: {(x >= 0).all()}")

# Equal seed and dims reproduce the map bit for bit.
again = ProjectionBuffer(d_feat=8, d_buf=32, seed=42)
print("same seed, same projection:",
      np.array_equal(x, again.project(records[0].vector)))

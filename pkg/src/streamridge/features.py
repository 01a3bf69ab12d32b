"""Feature records, the on-disk dataset format, and the frozen random projection.

Binary dataset layout (little-endian):

    header:  magic b"AEFF" | u32 version=1 | u32 d_feat | u32 num_classes | u64 num_records
    record:  u32 label | u32 task_id | f32 * d_feat          (repeated num_records times)

Vectors are stored as 32-bit floats; all arithmetic downstream is done in
64-bit. A CSV fallback (``label,task_id,f0,f1,...``) exists for tiny
hand-made fixtures.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import FormatError, InputError

MAGIC = b"AEFF"
VERSION = 1

_HEADER_STRUCT = struct.Struct("<4sIIIQ")
_RECORD_HEAD_STRUCT = struct.Struct("<II")


@dataclass(frozen=True)
class DatasetHeader:
    """Fixed-size prefix of a binary feature file."""

    d_feat: int
    num_classes: int
    num_records: int
    version: int = VERSION

    def __post_init__(self):
        if self.num_classes < 2:
            raise InputError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.d_feat < 1:
            raise InputError(f"d_feat must be >= 1, got {self.d_feat}")


@dataclass
class FeatureRecord:
    """One labeled backbone feature vector with its task index."""

    label: int
    task_id: int
    vector: np.ndarray

    def validate(self, header: DatasetHeader) -> None:
        if not 0 <= self.label < header.num_classes:
            raise InputError(
                f"label {self.label} out of range [0, {header.num_classes})"
            )
        if self.task_id < 0:
            raise InputError(f"task_id must be >= 0, got {self.task_id}")
        if self.vector.shape != (header.d_feat,):
            raise InputError(
                f"vector has shape {self.vector.shape}, expected ({header.d_feat},)"
            )
        if not np.all(np.isfinite(self.vector)):
            raise InputError("vector contains non-finite entries")


class ProjectionBuffer:
    """Frozen random linear map plus rectification.

    Lifts backbone features of width ``d_feat`` to classifier inputs of width
    ``d_buf`` via ``max(0, f @ weights)``. Weights are drawn once from
    ``numpy.random.default_rng(seed)`` as i.i.d. normals with standard
    deviation ``scale / sqrt(d_feat)`` and never change afterwards, so equal
    (seed, d_feat, d_buf, scale) reproduce bit-identical projections.
    """

    def __init__(self, d_feat: int, d_buf: int, seed: int, scale: float = 1.0):
        if d_feat < 1 or d_buf < 1:
            raise InputError(f"invalid buffer dims d_feat={d_feat}, d_buf={d_buf}")
        if scale <= 0:
            raise InputError(f"scale must be > 0, got {scale}")
        self.d_feat = d_feat
        self.d_buf = d_buf
        self.seed = seed
        self.scale = scale
        rng = np.random.default_rng(seed)
        weights = rng.standard_normal((d_feat, d_buf)) * (scale / np.sqrt(d_feat))
        weights.setflags(write=False)
        self.weights = weights

    def project(self, f: np.ndarray) -> np.ndarray:
        """Project one vector (d_feat,) or a stack (n, d_feat); output is rectified."""
        f = np.asarray(f, dtype=np.float64)
        if f.shape[-1] != self.d_feat:
            raise InputError(
                f"feature width {f.shape[-1]} does not match buffer d_feat {self.d_feat}"
            )
        return np.maximum(f @ self.weights, 0.0)

    def __repr__(self) -> str:
        return (
            f"ProjectionBuffer(d_feat={self.d_feat}, d_buf={self.d_buf}, "
            f"seed={self.seed}, scale={self.scale})"
        )


def project(record: FeatureRecord, buf: ProjectionBuffer) -> np.ndarray:
    """Lift one record's feature vector through the buffer."""
    return buf.project(record.vector)


def one_hot(label: int, num_classes: int) -> np.ndarray:
    """Target row vector: 1 at ``label``, 0 elsewhere."""
    if not 0 <= label < num_classes:
        raise InputError(f"label {label} out of range [0, {num_classes})")
    row = np.zeros(num_classes, dtype=np.float64)
    row[label] = 1.0
    return row


def one_hot_matrix(labels: Iterable[int], num_classes: int) -> np.ndarray:
    """Stack of one-hot rows for a label sequence."""
    labels = np.asarray(list(labels), dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise InputError(f"labels out of range [0, {num_classes})")
    out = np.zeros((labels.size, num_classes), dtype=np.float64)
    out[np.arange(labels.size), labels] = 1.0
    return out


def write_dataset(
    path: str | Path,
    d_feat: int,
    num_classes: int,
    records: Iterable[FeatureRecord],
) -> DatasetHeader:
    """Write records to ``path`` in the binary format; returns the final header.

    The record count is patched into the header after the stream is
    exhausted, so ``records`` may be a generator.
    """
    path = Path(path)
    count = 0
    probe = DatasetHeader(d_feat=d_feat, num_classes=num_classes, num_records=0)
    with open(path, "wb") as fh:
        fh.write(_HEADER_STRUCT.pack(MAGIC, VERSION, d_feat, num_classes, 0))
        for rec in records:
            rec.validate(probe)
            fh.write(_RECORD_HEAD_STRUCT.pack(rec.label, rec.task_id))
            fh.write(np.asarray(rec.vector, dtype="<f4").tobytes())
            count += 1
        fh.seek(0)
        fh.write(_HEADER_STRUCT.pack(MAGIC, VERSION, d_feat, num_classes, count))
    return DatasetHeader(d_feat=d_feat, num_classes=num_classes, num_records=count)


def read_header(path: str | Path) -> DatasetHeader:
    """Parse and validate just the header of a binary feature file."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER_STRUCT.size)
    if len(raw) < _HEADER_STRUCT.size:
        raise FormatError(f"{path}: file too short for header", offset=len(raw))
    magic, version, d_feat, num_classes, num_records = _HEADER_STRUCT.unpack(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}", offset=4)
    try:
        return DatasetHeader(
            d_feat=d_feat, num_classes=num_classes, num_records=num_records
        )
    except InputError as exc:
        raise FormatError(f"{path}: invalid header: {exc}", offset=8) from exc


def read_dataset(
    path: str | Path,
) -> tuple[DatasetHeader, Iterator[FeatureRecord]]:
    """Open a binary feature file; returns (header, streaming record iterator).

    The iterator yields records in file order and raises FormatError on
    truncation (fewer records than the header promises) with the byte offset
    at which the file ran out.
    """
    path = Path(path)
    header = read_header(path)

    def _iter() -> Iterator[FeatureRecord]:
        vec_bytes = 4 * header.d_feat
        offset = _HEADER_STRUCT.size
        with open(path, "rb") as fh:
            fh.seek(offset)
            for i in range(header.num_records):
                head = fh.read(_RECORD_HEAD_STRUCT.size)
                if len(head) < _RECORD_HEAD_STRUCT.size:
                    raise FormatError(
                        f"{path}: truncated at record {i} of {header.num_records}",
                        offset=offset + len(head),
                    )
                label, task_id = _RECORD_HEAD_STRUCT.unpack(head)
                payload = fh.read(vec_bytes)
                if len(payload) < vec_bytes:
                    raise FormatError(
                        f"{path}: truncated vector at record {i} of {header.num_records}",
                        offset=offset + _RECORD_HEAD_STRUCT.size + len(payload),
                    )
                vector = np.frombuffer(payload, dtype="<f4").astype(np.float32)
                rec = FeatureRecord(label=label, task_id=task_id, vector=vector)
                rec.validate(header)
                offset += _RECORD_HEAD_STRUCT.size + vec_bytes
                yield rec

    return header, _iter()


def read_csv_dataset(
    path: str | Path, num_classes: int | None = None
) -> tuple[DatasetHeader, list[FeatureRecord]]:
    """Read the CSV fallback format ``label,task_id,f0,f1,...``.

    Intended for tiny hand-made fixtures; the whole file is materialized.
    ``num_classes`` defaults to ``max(label) + 1``.
    """
    records: list[FeatureRecord] = []
    d_feat = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                label, task_id = int(row[0]), int(row[1])
                vector = np.array([float(v) for v in row[2:]], dtype=np.float32)
            except (ValueError, IndexError) as exc:
                raise FormatError(f"{path}:{lineno}: malformed row: {exc}") from exc
            if d_feat is None:
                d_feat = vector.size
                if d_feat < 1:
                    raise FormatError(f"{path}:{lineno}: row has no feature values")
            elif vector.size != d_feat:
                raise FormatError(
                    f"{path}:{lineno}: expected {d_feat} feature values, got {vector.size}"
                )
            records.append(FeatureRecord(label=label, task_id=task_id, vector=vector))
    if d_feat is None:
        raise FormatError(f"{path}: no records")
    if num_classes is None:
        num_classes = max(rec.label for rec in records) + 1
    header = DatasetHeader(
        d_feat=d_feat, num_classes=num_classes, num_records=len(records)
    )
    for rec in records:
        rec.validate(header)
    return header, records

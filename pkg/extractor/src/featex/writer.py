"""Binary feature-file writer.

The format is the cross-component contract (little-endian):

    header:  magic b"AEFF" | u32 version=1 | u32 d_feat | u32 num_classes | u64 num_records
    record:  u32 label | u32 task_id | f32 * d_feat

Implemented here independently of the consuming engine; the bytes are the
interface.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable

import numpy as np

MAGIC = b"AEFF"
VERSION = 1

_HEADER = struct.Struct("<4sIIIQ")
_RECORD_HEAD = struct.Struct("<II")


def write_features(
    path: str | Path,
    d_feat: int,
    num_classes: int,
    rows: Iterable[tuple[int, int, np.ndarray]],
) -> int:
    """Write (label, task_id, vector) rows; returns the record count.

    The count is patched into the header once the row iterable is
    exhausted.
    """
    path = Path(path)
    count = 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, d_feat, num_classes, 0))
        for label, task_id, vector in rows:
            vector = np.asarray(vector, dtype="<f4")
            if vector.shape != (d_feat,):
                raise ValueError(
                    f"vector has shape {vector.shape}, expected ({d_feat},)"
                )
            fh.write(_RECORD_HEAD.pack(label, task_id))
            fh.write(vector.tobytes())
            count += 1
        fh.seek(0)
        fh.write(_HEADER.pack(MAGIC, VERSION, d_feat, num_classes, count))
    return count

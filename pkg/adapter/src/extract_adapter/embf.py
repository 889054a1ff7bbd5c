"""EMBF container writer/reader, independent of the consumer package.

Layout: magic ``EMBF``, u32 version = 1, u64 rows, u32 dim, u8 dtype = 1
(float32 LE), 3 zero pad bytes, then row-major float32 values; 24-byte
header total. IDs go to ``<path>.ids`` as UTF-8 lines joined by a single
newline with no trailing blank line.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMBF"
HEADER = struct.Struct("<4sIQIB3x")


class EmbfFormatError(ValueError):
    pass


def write_embf(path, values: np.ndarray, ids: list[str]) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2 or values.shape[1] < 1:
        raise EmbfFormatError(f"need a 2-D matrix with dim >= 1, got {values.shape}")
    if not np.isfinite(values).all():
        raise EmbfFormatError("non-finite value in matrix")
    if len(ids) != values.shape[0]:
        raise EmbfFormatError(f"{len(ids)} ids for {values.shape[0]} rows")
    if len(set(ids)) != len(ids):
        raise EmbfFormatError("duplicate ids")
    for s in ids:
        if not s or any(c in s for c in "\t\n\r"):
            raise EmbfFormatError(f"bad id {s!r}")
    with open(path, "wb") as f:
        f.write(HEADER.pack(MAGIC, 1, values.shape[0], values.shape[1], 1))
        f.write(values.tobytes())
    with open(str(path) + ".ids", "wb") as f:
        f.write("\n".join(ids).encode("utf-8"))


def read_embf(path) -> tuple[np.ndarray, list[str]]:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise EmbfFormatError(f"cannot read {path}: {e}") from e
    if len(data) < HEADER.size:
        raise EmbfFormatError("truncated header")
    magic, version, rows, dim, dtype = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise EmbfFormatError(f"bad magic {magic!r}")
    if version != 1 or dtype != 1:
        raise EmbfFormatError(f"unsupported version/dtype {version}/{dtype}")
    if dim < 1:
        raise EmbfFormatError("dim must be >= 1")
    if len(data) - HEADER.size != rows * dim * 4:
        raise EmbfFormatError(
            f"payload is {len(data) - HEADER.size} bytes, expected {rows * dim * 4}"
        )
    values = np.frombuffer(data, dtype="<f4", offset=HEADER.size).reshape(rows, dim)
    ids_path = Path(str(path) + ".ids")
    if not ids_path.exists():
        raise EmbfFormatError(f"missing id sidecar {ids_path}")
    text = ids_path.read_bytes().decode("utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    ids = text.split("\n") if text else []
    if len(ids) != rows:
        raise EmbfFormatError(f"sidecar has {len(ids)} ids, matrix has {rows} rows")
    return values, ids

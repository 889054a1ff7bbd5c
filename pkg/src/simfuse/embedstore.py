"""Binary embedding container (EMBF) with an ID sidecar, plus L2 normalization.

File layout, byte exact:

    offset  size  field
    0       4     magic ``EMBF`` (``45 4D 42 46``)
    4       4     version, u32 little-endian, currently 1
    8       8     rows, u64 little-endian
    16      4     dim, u32 little-endian
    20      1     dtype code, u8, 1 = float32 little-endian
    21      3     padding, must be zero
    24      -     rows * dim float32 values, row-major

The ID sidecar lives at ``<path>.ids``: UTF-8, one ID per line joined by a
single ``\\n`` with no trailing blank line (a single trailing newline is
tolerated on read).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"EMBF"
VERSION = 1
DTYPE_F32 = 1
HEADER = struct.Struct("<4sIQIB3x")  # 24 bytes
UNIT_NORM_TOL = 1e-5
ZERO_NORM_FLOOR = 1e-12


class EmbfError(ValueError):
    """Malformed EMBF file or invariant violation."""


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Dense row-major float32 matrix, one vector per row.

    ``normalized`` asserts that every row has unit L2 norm within 1e-5;
    it is validated at construction, so a carried flag can be trusted.
    """

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2:
            raise EmbfError(f"matrix must be 2-dimensional, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise EmbfError("dim must be >= 1")
        if arr.dtype != np.float32:
            arr = arr.astype(np.float32)
        arr = np.ascontiguousarray(arr)
        if not np.isfinite(arr).all():
            raise EmbfError("non-finite value in matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.normalized and arr.shape[0] > 0:
            norms = row_norms(arr)
            worst = float(np.abs(norms - 1.0).max())
            if worst > UNIT_NORM_TOL:
                raise EmbfError(
                    f"normalized flag set but a row norm deviates by {worst:.3g}"
                )

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class IdTable:
    """Ordered external string IDs, one per matrix row, all unique."""

    ids: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ids = tuple(self.ids)
        seen = set()
        for i, s in enumerate(ids):
            if not isinstance(s, str) or not s:
                raise EmbfError(f"empty or non-string id at row {i}")
            if "\t" in s or "\n" in s or "\r" in s:
                raise EmbfError(f"id at row {i} contains tab/newline/carriage-return")
            if s in seen:
                raise EmbfError(f"duplicate id {s!r} at row {i}")
            seen.add(s)
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, i):
        return self.ids[i]


def row_norms(values: np.ndarray) -> np.ndarray:
    """Per-row L2 norms, accumulated in float64."""
    return np.sqrt(np.einsum("ij,ij->i", values, values, dtype=np.float64))


def is_unit_normalized(values: np.ndarray, tol: float = UNIT_NORM_TOL) -> bool:
    if values.shape[0] == 0:
        return True
    return bool(np.abs(row_norms(values) - 1.0).max() <= tol)


def l2_normalize(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm.

    Raises EmbfError for any row with norm below 1e-12: a zero vector has
    no direction and would make cosine similarity undefined.
    """
    values = matrix.values
    if values.shape[0] == 0:
        return EmbeddingMatrix(values, normalized=True)
    norms = row_norms(values)
    bad = np.flatnonzero(norms < ZERO_NORM_FLOOR)
    if bad.size:
        raise EmbfError(f"zero-norm row {int(bad[0])}")
    inv = (1.0 / norms).astype(np.float32)
    return EmbeddingMatrix(values * inv[:, None], normalized=True)


def write_embf(path, matrix: EmbeddingMatrix, ids: IdTable) -> None:
    """Write matrix to ``path`` and its ID sidecar to ``path + '.ids'``.

    All invariants are checked before any bytes hit disk.
    """
    if len(ids) != matrix.rows:
        raise EmbfError(
            f"id count {len(ids)} does not match matrix rows {matrix.rows}"
        )
    path = Path(path)
    header = HEADER.pack(MAGIC, VERSION, matrix.rows, matrix.dim, DTYPE_F32)
    payload = np.ascontiguousarray(matrix.values, dtype="<f4").tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload)
    with open(str(path) + ".ids", "wb") as f:
        f.write("\n".join(ids.ids).encode("utf-8"))


def read_ids(path) -> IdTable:
    """Read an ID sidecar file (the ``.ids`` path itself)."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise EmbfError(f"missing id sidecar: {e}") from e
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EmbfError(f"id sidecar is not valid UTF-8: {e}") from e
    if text.endswith("\n"):
        text = text[:-1]
    return IdTable(tuple(text.split("\n")) if text else ())


def read_embf(path) -> tuple[EmbeddingMatrix, IdTable]:
    """Read an EMBF file and its sidecar.

    Every length is validated against the actual file size before any
    array is materialized, so corrupt input fails with EmbfError instead
    of a crash or an unbounded allocation.
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < HEADER.size:
        raise EmbfError(f"truncated header: {len(data)} bytes, need {HEADER.size}")
    magic, version, rows, dim, dtype = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise EmbfError(f"bad magic {magic!r}")
    if version != VERSION:
        raise EmbfError(f"unsupported version {version}")
    if dtype != DTYPE_F32:
        raise EmbfError(f"unsupported dtype code {dtype}")
    if data[21:24] != b"\x00\x00\x00":
        raise EmbfError("nonzero padding bytes in header")
    if dim < 1:
        raise EmbfError("dim must be >= 1")
    expected = rows * dim * 4
    actual = len(data) - HEADER.size
    if actual < expected:
        raise EmbfError(f"truncated payload: {expected} bytes expected, {actual} present")
    if actual > expected:
        raise EmbfError(f"trailing bytes: {expected} bytes expected, {actual} present")
    values = np.frombuffer(data, dtype="<f4", offset=HEADER.size).reshape(rows, dim)
    if not np.isfinite(values).all():
        raise EmbfError("non-finite value in payload")
    ids = read_ids(str(path) + ".ids")
    if len(ids) != rows:
        raise EmbfError(f"sidecar has {len(ids)} ids, matrix has {rows} rows")
    return EmbeddingMatrix(values, normalized=is_unit_normalized(values)), ids

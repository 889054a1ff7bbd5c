"""Extraction jobs: render, encode in batches, pool, normalize, write EMBF."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .embf import write_embf
from .pooling import POOLERS, default_pooling, l2_normalize_rows
from .prompts import load_records, render_document, render_query
from .stub import StubEncoder

DEFAULT_MAX_LENGTH = {"query": 32, "document": 156}


@dataclass(frozen=True)
class ExtractionJob:
    model_name: str
    input_path: str
    kind: str  # "query" | "document"
    out_path: str
    tag_id: int = 1
    instruction_id: int = 1
    pooling: Optional[str] = None  # None = model default
    max_length: Optional[int] = None  # None = kind default
    batch_size: int = 32
    stub: bool = False
    stub_dim: int = 64

    def __post_init__(self):
        if self.kind not in ("query", "document"):
            raise ValueError(f"kind must be 'query' or 'document', got {self.kind!r}")
        if self.pooling is not None and self.pooling not in POOLERS:
            raise ValueError(f"pooling must be one of {sorted(POOLERS)}")
        if self.max_length is not None and self.max_length < 1:
            raise ValueError("max_length must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    @property
    def effective_pooling(self) -> str:
        return self.pooling or default_pooling(self.model_name)

    @property
    def effective_max_length(self) -> int:
        return self.max_length or DEFAULT_MAX_LENGTH[self.kind]


def render_records(job: ExtractionJob) -> tuple[list[str], list[str]]:
    """(ids, prompts) for the job's input file, in file order."""
    ids, prompts = [], []
    for rec in load_records(job.input_path, job.kind):
        rid, a, b = rec
        if b is None:  # pre-rendered {"id", "text"} record
            text = a
        elif job.kind == "query":
            text = render_query(a, b, job.tag_id, job.instruction_id)
        else:
            text = render_document(a, b)
        ids.append(rid)
        prompts.append(text)
    if not ids:
        raise ValueError(f"empty input: {job.input_path}")
    return ids, prompts


def run_extraction(job: ExtractionJob, encoder=None) -> tuple[int, int]:
    """Execute a job; returns (rows, dim) of the written matrix.

    ``encoder`` is injectable for tests; otherwise a stub or HF encoder is
    built from the job.
    """
    ids, prompts = render_records(job)
    if encoder is None:
        if job.stub:
            encoder = StubEncoder(job.model_name, job.stub_dim)
        else:
            from .encoders import HFEncoder

            encoder = HFEncoder(job.model_name)
    pool = POOLERS[job.effective_pooling]
    max_length = job.effective_max_length

    pooled_batches = []
    for start in range(0, len(prompts), job.batch_size):
        hidden, mask = encoder.encode_batch(
            prompts[start : start + job.batch_size], max_length
        )
        pooled_batches.append(pool(hidden, mask))
    vectors = l2_normalize_rows(np.concatenate(pooled_batches, axis=0))
    write_embf(job.out_path, vectors, ids)
    return vectors.shape[0], vectors.shape[1]

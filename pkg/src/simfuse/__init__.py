"""Multi-model dense-retrieval similarity fusion engine."""

from .embedstore import (
    EmbeddingMatrix,
    EmbfError,
    IdTable,
    l2_normalize,
    read_embf,
    write_embf,
)
from .evalkit import average_precision_at_k, map_at_k, recall_at_k
from .fusion import FusedRanking, FusionConfig, fuse_run, tune_weights, write_submission
from .promptkit import (
    DocRecord,
    QueryRecord,
    config_matrix,
    render_document,
    render_query_prompt,
    render_tag,
)
from .simsearch import CandidateSet, full_similarity, topk_search

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "DocRecord",
    "EmbeddingMatrix",
    "EmbfError",
    "FusedRanking",
    "FusionConfig",
    "IdTable",
    "QueryRecord",
    "average_precision_at_k",
    "config_matrix",
    "full_similarity",
    "fuse_run",
    "l2_normalize",
    "map_at_k",
    "read_embf",
    "recall_at_k",
    "render_document",
    "render_query_prompt",
    "render_tag",
    "topk_search",
    "tune_weights",
    "write_embf",
    "write_submission",
]

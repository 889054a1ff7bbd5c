"""Exact top-M inner-product search, blocked and thread-parallel.

Queries are processed in stripes and documents in blocks, so memory stays
at O(stripe * block) for scores plus O(stripe * M) for the running
selection. Each (score, doc_index) pair is packed into one uint64 key that
sorts ascending exactly as (score descending, doc_index ascending), which
makes every truncation step vectorized, tie-exact, and independent of the
thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embedstore import EmbeddingMatrix, IdTable

_SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)
_MAX_DOCS = 2**32 - 1


@dataclass(frozen=True)
class CandidateSet:
    """Top documents for one query, ordered by (score desc, doc_index asc)."""

    query_index: int
    doc_indices: np.ndarray  # int64
    scores: np.ndarray  # finite; float32 raw, float64 once normalized

    def __len__(self) -> int:
        return len(self.doc_indices)

    def truncated(self, m: int) -> "CandidateSet":
        """First min(m, len) entries; the order key makes this exact."""
        if m < 1:
            raise ValueError(f"truncation depth must be >= 1, got {m}")
        if m >= len(self):
            return self
        return CandidateSet(self.query_index, self.doc_indices[:m], self.scores[:m])


def _float_to_ordered_u32(scores: np.ndarray) -> np.ndarray:
    """Map float32 to uint32 preserving order: a < b iff map(a) < map(b)."""
    bits = scores.view(np.uint32)
    negative = bits >> np.uint32(31) == 1
    return np.where(negative, ~bits, bits | np.uint32(0x80000000))


def _ordered_u32_to_float(mapped: np.ndarray) -> np.ndarray:
    negative = mapped & np.uint32(0x80000000) == 0
    bits = np.where(negative, ~mapped, mapped ^ np.uint32(0x80000000))
    return bits.astype(np.uint32).view(np.float32)


def _pack_keys(scores: np.ndarray, doc_indices: np.ndarray) -> np.ndarray:
    """uint64 keys whose ascending order is (score desc, doc_index asc)."""
    scores = scores + np.float32(0.0)  # collapse -0.0 onto +0.0
    inv = np.uint32(0xFFFFFFFF) - _float_to_ordered_u32(scores)
    return (inv.astype(np.uint64) << np.uint64(32)) | doc_indices.astype(np.uint64)


def _unpack_keys(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = (keys & np.uint64(0xFFFFFFFF)).astype(np.int64)
    inv = (keys >> np.uint64(32)).astype(np.uint32)
    scores = _ordered_u32_to_float(np.uint32(0xFFFFFFFF) - inv)
    return idx, scores


def _check_inputs(queries: EmbeddingMatrix, docs: EmbeddingMatrix) -> None:
    if queries.dim != docs.dim:
        raise ValueError(
            f"dimension mismatch: queries dim {queries.dim}, docs dim {docs.dim}"
        )
    if not queries.normalized or not docs.normalized:
        raise ValueError("unnormalized input: run l2_normalize first")
    if docs.rows > _MAX_DOCS:
        raise ValueError(f"document count {docs.rows} exceeds {_MAX_DOCS}")


def full_similarity(queries: EmbeddingMatrix, docs: EmbeddingMatrix) -> np.ndarray:
    """Dense (queries x docs) inner-product matrix, float32.

    Intended for small exact-mode runs and verification; the caller is
    responsible for the rows*cols memory.
    """
    _check_inputs(queries, docs)
    return queries.values @ docs.values.T


def topk_search(
    queries: EmbeddingMatrix,
    docs: EmbeddingMatrix,
    m: int,
    n_threads: int | None = None,
    query_block: int = 256,
    doc_block: int = 65536,
) -> list[CandidateSet]:
    """Exact top-``m`` documents per query by inner product.

    Results are bit-identical for any ``n_threads``: the work is split by
    query stripes, each stripe's selection is owned by one worker, and
    stripes are merged back in order.
    """
    _check_inputs(queries, docs)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    n_queries, n_docs = queries.rows, docs.rows
    keep = min(m, n_docs)
    q = queries.values
    d = docs.values

    def block_topm_keys(scores: np.ndarray, j0: int) -> np.ndarray:
        """Keys of each row's top-m block entries, tie-exact."""
        rows, width = scores.shape
        if width > m:
            # fast path: threshold on raw scores, pack keys for survivors only;
            # boundary ties make the survivor count exceed m, so fall back
            threshold = np.partition(scores, width - m, axis=1)[:, width - m]
            mask = scores >= threshold[:, None]
            if int(np.count_nonzero(mask)) == rows * m:
                cols = np.nonzero(mask)[1].reshape(rows, m).astype(np.uint64)
                return _pack_keys(scores[mask].reshape(rows, m), cols + np.uint64(j0))
        cols = np.broadcast_to(np.arange(j0, j0 + width, dtype=np.uint64), scores.shape)
        keys = _pack_keys(scores, cols)
        if width > m:
            keys = np.partition(keys, m - 1, axis=1)[:, :m]
        return keys

    def run_stripe(lo: int, hi: int) -> np.ndarray:
        best = np.full((hi - lo, m), _SENTINEL, dtype=np.uint64)
        for j0 in range(0, n_docs, doc_block):
            j1 = min(j0 + doc_block, n_docs)
            keys = block_topm_keys(q[lo:hi] @ d[j0:j1].T, j0)
            best = np.sort(np.concatenate([best, keys], axis=1), axis=1)[:, :m]
        return best[:, :keep]

    stripes = [(lo, min(lo + query_block, n_queries)) for lo in range(0, n_queries, query_block)]
    if n_threads is not None and n_threads < 1:
        raise ValueError(f"n_threads must be >= 1, got {n_threads}")
    if n_threads == 1 or len(stripes) <= 1:
        results = [run_stripe(lo, hi) for lo, hi in stripes]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(lambda s: run_stripe(*s), stripes))

    out = []
    for (lo, _), block in zip(stripes, results):
        for r in range(block.shape[0]):
            idx, scores = _unpack_keys(block[r])
            out.append(CandidateSet(lo + r, idx, scores))
    return out


def write_run(path, candidates: list[CandidateSet], query_ids: IdTable, doc_ids: IdTable) -> None:
    """Serialize candidate sets as ``query_id\\tdoc_id\\trank\\tscore`` lines.

    Ranks start at 1; scores are fixed-notation with 6 fractional digits.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for cs in candidates:
            qid = query_ids[cs.query_index]
            lines = [
                f"{qid}\t{doc_ids[int(di)]}\t{rank}\t{score:.6f}\n"
                for rank, (di, score) in enumerate(zip(cs.doc_indices, cs.scores), 1)
            ]
            f.write("".join(lines))


def read_run(path) -> tuple[list[str], dict[str, tuple[list[str], np.ndarray]]]:
    """Read a run file back as (query order, qid -> (doc_ids, scores)).

    Entries keep file order, which is rank order for files produced by
    write_run.
    """
    order: list[str] = []
    by_query: dict[str, tuple[list[str], list[float]]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            qid, did, _rank, score = parts
            if qid not in by_query:
                by_query[qid] = ([], [])
                order.append(qid)
            by_query[qid][0].append(did)
            try:
                by_query[qid][1].append(float(score))
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: bad score {score!r}") from e
    return order, {
        q: (ids, np.asarray(scores, dtype=np.float64))
        for q, (ids, scores) in by_query.items()
    }


def naive_topk(queries: EmbeddingMatrix, docs: EmbeddingMatrix, m: int) -> list[CandidateSet]:
    """Single-loop exhaustive reference: one matvec and one full sort per query.

    Kept deliberately independent of topk_search for oracle comparisons.
    """
    _check_inputs(queries, docs)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    out = []
    d = docs.values
    for qi in range(queries.rows):
        scores = d @ queries.values[qi]
        order = np.lexsort((np.arange(docs.rows), -scores.astype(np.float64)))[:m]
        out.append(
            CandidateSet(qi, order.astype(np.int64), scores[order].astype(np.float32))
        )
    return out

"""Per-query score normalization, weighted multi-model fusion, and weight tuning.

Scores from each model are min-max rescaled to [0, 1] per query over that
model's retained candidates, then combined as sum_m w_m * n_m(d) over the
union of all models' candidates. Documents a model never retained take
``missing_fill`` for that model; candidate sets whose retained scores are
all equal collapse to ``degenerate_fill``. Fused ties break on ascending
lexicographic doc id so output is reproducible byte for byte.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .embedstore import IdTable
from .evalkit import Qrels, map_at_k
from .simsearch import CandidateSet

DEGENERATE_SPAN = 1e-12


@dataclass(frozen=True)
class FusionConfig:
    weights: tuple
    M: int = 1000
    k: int = 20
    degenerate_fill: float = 0.5
    missing_fill: float = 0.0

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if not weights:
            raise ValueError("weights must be non-empty")
        if any(w < 0 or not np.isfinite(w) for w in weights):
            raise ValueError("weights must be finite and >= 0")
        if not any(w > 0 for w in weights):
            raise ValueError("all-zero weights")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.M < self.k:
            raise ValueError(f"M ({self.M}) must be >= k ({self.k})")
        if not 0.0 <= self.missing_fill <= self.degenerate_fill <= 1.0:
            raise ValueError(
                "fills must satisfy 0 <= missing_fill <= degenerate_fill <= 1"
            )

    def to_json(self) -> str:
        return json.dumps(
            {
                "weights": list(self.weights),
                "M": self.M,
                "k": self.k,
                "degenerate_fill": self.degenerate_fill,
                "missing_fill": self.missing_fill,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "FusionConfig":
        obj = json.loads(text)
        if not isinstance(obj, dict) or "weights" not in obj:
            raise ValueError("fusion config must be a JSON object with 'weights'")
        known = {k: obj[k] for k in ("M", "k", "degenerate_fill", "missing_fill") if k in obj}
        return cls(weights=tuple(obj["weights"]), **known)


@dataclass(frozen=True)
class FusedRanking:
    """Top-k fused documents for one query, score-descending."""

    query_id: str
    entries: tuple = field(default_factory=tuple)  # (doc_id, fused_score) pairs

    @property
    def doc_ids(self) -> tuple:
        return tuple(d for d, _ in self.entries)


def minmax_normalize(scores: np.ndarray, degenerate_fill: float = 0.5) -> np.ndarray:
    """Map scores to [0, 1] by (s - min) / (max - min), in float64.

    A span below 1e-12 is degenerate: every score becomes degenerate_fill.
    """
    if len(scores) == 0:
        raise ValueError("empty candidate set")
    s = np.asarray(scores, dtype=np.float64)
    lo = s.min()
    span = s.max() - lo
    if span < DEGENERATE_SPAN:
        return np.full(len(s), float(degenerate_fill))
    return (s - lo) / span


def normalize_per_query(cands: CandidateSet, degenerate_fill: float = 0.5) -> CandidateSet:
    """Min-max normalize one query's retained scores; entry order is unchanged."""
    return CandidateSet(
        cands.query_index,
        cands.doc_indices,
        minmax_normalize(cands.scores, degenerate_fill),
    )


def _select_top(
    universe: np.ndarray, fused: np.ndarray, universe_ids: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exact top-k under (fused desc, doc_id lexicographic asc)."""
    n = len(universe)
    kk = min(k, n)
    if n > kk:
        threshold = np.partition(fused, n - kk)[n - kk]
        near = np.flatnonzero(fused >= threshold)
    else:
        near = np.arange(n)
    order = np.lexsort((universe_ids[near], -fused[near]))[:kk]
    pick = near[order]
    return universe[pick], fused[pick]


def fuse_query(
    idx_per_model: Sequence[np.ndarray],
    norm_per_model: Sequence[np.ndarray],
    weights: Sequence[float],
    missing_fill: float,
    k: int,
    doc_id_arr: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Fuse one query given per-model candidate indices and normalized scores.

    Returns (doc index array, fused score array), both length <= k. The
    weighted sum is accumulated in model order so results are reproducible.
    """
    universe = np.unique(np.concatenate(idx_per_model))
    acc = np.zeros(len(universe))
    covered = np.zeros(len(universe))
    for w, idx, norm in zip(weights, idx_per_model, norm_per_model):
        pos = np.searchsorted(universe, idx)
        acc[pos] += w * norm
        covered[pos] += w
    total = float(sum(weights))
    fused = acc + missing_fill * (total - covered)
    return _select_top(universe, fused, doc_id_arr[universe], k)


def fuse(
    per_model_cands: Sequence[CandidateSet],
    config: FusionConfig,
    query_id: str,
    doc_id_arr: np.ndarray,
) -> FusedRanking:
    """Fuse one query's already-normalized candidate sets into a FusedRanking."""
    if len(config.weights) != len(per_model_cands):
        raise ValueError(
            f"weight/model count mismatch: {len(config.weights)} weights, "
            f"{len(per_model_cands)} models"
        )
    idx, scores = fuse_query(
        [c.doc_indices for c in per_model_cands],
        [c.scores for c in per_model_cands],
        config.weights,
        config.missing_fill,
        config.k,
        doc_id_arr,
    )
    entries = tuple((str(doc_id_arr[i]), float(s)) for i, s in zip(idx, scores))
    return FusedRanking(query_id, entries)


def _as_id_array(ids) -> np.ndarray:
    if isinstance(ids, np.ndarray):
        return ids
    seq = ids.ids if isinstance(ids, IdTable) else tuple(ids)
    return np.asarray(seq, dtype=np.str_)


def _check_same_queries(all_models: Sequence[Sequence[CandidateSet]]) -> None:
    first = [c.query_index for c in all_models[0]]
    for m, cands in enumerate(all_models[1:], 1):
        if [c.query_index for c in cands] != first:
            raise ValueError(f"query-set mismatch between model 0 and model {m}")


def fuse_run(
    all_models: Sequence[Sequence[CandidateSet]],
    query_ids,
    doc_ids,
    config: FusionConfig,
) -> list[FusedRanking]:
    """Normalize then fuse every query; models must share the query order."""
    if len(config.weights) != len(all_models):
        raise ValueError(
            f"weight/model count mismatch: {len(config.weights)} weights, "
            f"{len(all_models)} models"
        )
    _check_same_queries(all_models)
    doc_id_arr = _as_id_array(doc_ids)
    query_id_arr = _as_id_array(query_ids)
    out = []
    for qi in range(len(all_models[0])):
        per_model = [
            normalize_per_query(model[qi].truncated(config.M), config.degenerate_fill)
            for model in all_models
        ]
        out.append(fuse(per_model, config, str(query_id_arr[all_models[0][qi].query_index]), doc_id_arr))
    return out


def simplex_grid(n_models: int, resolution: int):
    """Yield weight vectors on the unit simplex, lexicographically ascending.

    ``resolution`` points per axis gives step 1/(resolution - 1); the grid
    contains every one-hot corner. Grid size is C(r + n - 1, n - 1) with
    r = resolution - 1.
    """
    if resolution < 2:
        raise ValueError(f"grid resolution must be >= 2, got {resolution}")
    r = resolution - 1

    def parts(total: int, slots: int):
        if slots == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for rest in parts(total - head, slots - 1):
                yield (head,) + rest

    for combo in parts(r, n_models):
        yield tuple(c / r for c in combo)


def tune_weights(
    all_models: Sequence[Sequence[CandidateSet]],
    qrels: Qrels,
    grid_resolution: int,
    config: FusionConfig,
    query_ids,
    doc_ids,
    n_threads: int = 1,
) -> tuple[tuple, float]:
    """Exhaustive simplex-grid search for the MAP@k-maximizing weights.

    Every grid point is evaluated with the same fusion path as fuse_run, so
    the returned MAP is exactly reproducible by re-fusing with the winning
    weights. Ties prefer the lexicographically smallest weight vector; the
    result is never worse than any one-hot corner because all corners are
    grid members.
    """
    _check_same_queries(all_models)
    doc_id_arr = _as_id_array(doc_ids)
    query_id_arr = _as_id_array(query_ids)
    n_queries = len(all_models[0])
    qids = [str(query_id_arr[all_models[0][qi].query_index]) for qi in range(n_queries)]
    normalized = [
        [
            normalize_per_query(model[qi].truncated(config.M), config.degenerate_fill)
            for model in all_models
        ]
        for qi in range(n_queries)
    ]
    idx_lists = [[c.doc_indices for c in per_model] for per_model in normalized]
    norm_lists = [[c.scores for c in per_model] for per_model in normalized]

    def evaluate(weights: tuple) -> float:
        run = {}
        for qi in range(n_queries):
            idx, _ = fuse_query(
                idx_lists[qi], norm_lists[qi], weights,
                config.missing_fill, config.k, doc_id_arr,
            )
            run[qids[qi]] = [str(doc_id_arr[i]) for i in idx]
        return map_at_k(run, qrels, config.k)

    grid = list(simplex_grid(len(all_models), grid_resolution))
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            scores = list(pool.map(evaluate, grid))
    else:
        scores = [evaluate(w) for w in grid]

    best_i = 0
    for i in range(1, len(grid)):
        if scores[i] > scores[best_i]:
            best_i = i
    return grid[best_i], scores[best_i]


def tuned_config(config: FusionConfig, weights: Sequence[float]) -> FusionConfig:
    return replace(config, weights=tuple(weights))


def write_submission(rankings: Sequence[FusedRanking], path, k: Optional[int] = None) -> None:
    """One line per query, in input order: k space-separated doc ids.

    Every ranking must have exactly k entries; anything shorter is an
    error rather than a silently padded line.
    """
    if k is None:
        if not rankings:
            k = 0
        else:
            k = len(rankings[0].entries)
    lines = []
    for r in rankings:
        if len(r.entries) != k:
            raise ValueError(
                f"short ranking for query {r.query_id!r}: {len(r.entries)} of {k} entries"
            )
        lines.append(" ".join(r.doc_ids) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("".join(lines))


def write_fused_run(rankings: Sequence[FusedRanking], path) -> None:
    """Fused rankings in the 4-column run format, rank starting at 1."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in rankings:
            for rank, (did, score) in enumerate(r.entries, 1):
                f.write(f"{r.query_id}\t{did}\t{rank}\t{score:.6f}\n")

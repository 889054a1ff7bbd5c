"""Relevance judgments and ranking metrics: AP@k, MAP@k, Recall@k.

A query with an empty relevant set scores 0 and stays in the MAP mean;
a query judged in the qrels but absent from the run also contributes 0.
Both choices are deliberate so nothing is dropped silently.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Set

Qrels = Dict[str, Set[str]]
RunRanking = Dict[str, List[str]]


def average_precision_at_k(ranked: Sequence[str], relevant: Set[str], k: int) -> float:
    """AP@k = sum of precision@i at relevant ranks i <= k, over min(|relevant|, k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(set(ranked)) != len(ranked):
        raise ValueError("duplicate doc in ranking")
    if not relevant:
        return 0.0
    hits = 0
    total = 0.0
    for i, doc in enumerate(ranked[:k], 1):
        if doc in relevant:
            hits += 1
            total += hits / i
    return total / min(len(relevant), k)


def recall_at_k(ranked: Sequence[str], relevant: Set[str], k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not relevant:
        raise ValueError("empty relevant set")
    return len(set(ranked[:k]) & relevant) / len(relevant)


def map_at_k(run: RunRanking, qrels: Qrels, k: int) -> float:
    """Unweighted mean AP@k over every query judged in the qrels."""
    if not qrels:
        raise ValueError("empty qrels")
    if not set(run) & set(qrels):
        raise ValueError("no overlapping queries between run and qrels")
    return sum(
        average_precision_at_k(run.get(q, []), rel, k) for q, rel in qrels.items()
    ) / len(qrels)


def mean_recall_at_k(run: RunRanking, qrels: Qrels, k: int) -> float:
    """Mean Recall@k over judged queries with a non-empty relevant set."""
    judged = {q: rel for q, rel in qrels.items() if rel}
    if not judged:
        raise ValueError("no queries with relevant documents")
    return sum(
        recall_at_k(run.get(q, []), rel, k) for q, rel in judged.items()
    ) / len(judged)


def read_qrels(path) -> Qrels:
    """Parse tab-separated ``query_id\\tdoc_id`` lines into a Qrels mapping."""
    qrels: Qrels = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(
                    f"{path}:{lineno}: expected 'query_id<TAB>doc_id'"
                )
            qrels.setdefault(parts[0], set()).add(parts[1])
    return qrels


def write_qrels(qrels: Qrels, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for qid in sorted(qrels):
            for did in sorted(qrels[qid]):
                f.write(f"{qid}\t{did}\n")


def read_submission(path, query_ids: Sequence[str]) -> RunRanking:
    """Read a submission file given the query order it was written in."""
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if len(lines) != len(query_ids):
        raise ValueError(
            f"submission has {len(lines)} lines but {len(query_ids)} query ids given"
        )
    return {qid: line.split(" ") if line else [] for qid, line in zip(query_ids, lines)}

"""Seeded synthetic corpora with planted relevance for desk-scale verification.

Each query's relevant documents are noisy copies of that query's vector,
re-drawn independently per model so the models agree on relevance but
disagree on geometry, which is the regime where fusion helps. Randomness
comes from numpy's PCG64 generator seeded with (seed, model_index), so
output files are byte-identical across runs for a given seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedstore import EmbeddingMatrix, IdTable, l2_normalize, write_embf
from .evalkit import write_qrels


@dataclass(frozen=True)
class SynthSpec:
    n_queries: int = 200
    n_docs: int = 10000
    dim: int = 64
    n_models: int = 5
    relevant_per_query: int = 5
    noise: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.n_queries < 1 or self.n_docs < 1 or self.n_models < 1:
            raise ValueError("n_queries, n_docs, and n_models must be >= 1")
        if self.relevant_per_query < 1 or self.relevant_per_query > self.n_docs:
            raise ValueError(
                f"relevant_per_query must be in 1..n_docs, got {self.relevant_per_query}"
            )
        if self.n_queries * self.relevant_per_query > self.n_docs:
            raise ValueError(
                "n_queries * relevant_per_query exceeds n_docs; "
                "planted documents are disjoint per query"
            )
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")


def _ids(prefix: str, n: int) -> IdTable:
    return IdTable(tuple(f"{prefix}{i:08d}" for i in range(n)))


def generate_model(spec: SynthSpec, model_index: int) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
    """One model's (query matrix, doc matrix), both unit-normalized.

    Docs [q*r, (q+1)*r) are planted for query q as unit(query) + noise * g
    with g ~ N(0, I/dim), so the noise parameter is the perturbation norm
    relative to the unit signal.
    """
    rng = np.random.default_rng([spec.seed, model_index])
    q = rng.standard_normal((spec.n_queries, spec.dim), dtype=np.float32)
    d = rng.standard_normal((spec.n_docs, spec.dim), dtype=np.float32)
    eps = rng.standard_normal(
        (spec.n_queries * spec.relevant_per_query, spec.dim), dtype=np.float32
    )
    queries = l2_normalize(EmbeddingMatrix(q))
    planted = np.repeat(queries.values, spec.relevant_per_query, axis=0)
    scale = np.float32(spec.noise / np.sqrt(spec.dim))
    d[: len(planted)] = planted + scale * eps
    return queries, l2_normalize(EmbeddingMatrix(d))


def planted_qrels(spec: SynthSpec) -> dict:
    r = spec.relevant_per_query
    return {
        f"q{qi:08d}": {f"d{di:08d}" for di in range(qi * r, (qi + 1) * r)}
        for qi in range(spec.n_queries)
    }


def generate_corpus(spec: SynthSpec, out_dir) -> Path:
    """Write per-model EMBF pairs, qrels, a uniform fusion config, and a manifest.

    Returns the manifest path; the manifest references everything else with
    paths relative to its own directory, so the output tree is relocatable.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    query_ids = _ids("q", spec.n_queries)
    doc_ids = _ids("d", spec.n_docs)

    models = []
    for mi in range(spec.n_models):
        name = f"model{mi}"
        queries, docs = generate_model(spec, mi)
        write_embf(out / f"{name}.queries.embf", queries, query_ids)
        write_embf(out / f"{name}.docs.embf", docs, doc_ids)
        models.append(
            {
                "name": name,
                "queries": f"{name}.queries.embf",
                "docs": f"{name}.docs.embf",
            }
        )

    write_qrels(planted_qrels(spec), out / "qrels.tsv")
    config = {
        "weights": [1.0 / spec.n_models] * spec.n_models,
        "M": 1000,
        "k": 20,
        "degenerate_fill": 0.5,
        "missing_fill": 0.0,
    }
    (out / "fusion.json").write_text(json.dumps(config, indent=2), encoding="utf-8")
    manifest = {
        "models": models,
        "fusion_config": "fusion.json",
        "qrels": "qrels.tsv",
        "out_dir": "out",
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return manifest_path

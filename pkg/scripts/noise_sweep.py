"""Sweep planted-corpus noise and compare single models against fusion.

For each noise level: generate a 5-model corpus, search, then report MAP@20
for every one-hot corner, uniform weights, and tuned weights. The gap
between the best corner and the tuned row is the value fusion adds once
models disagree on geometry but agree on relevance.

Usage: python scripts/noise_sweep.py [--out DIR] [--seed N]
"""

import argparse
import tempfile
from pathlib import Path

import numpy as np

from simfuse.embedstore import read_embf
from simfuse.evalkit import map_at_k, read_qrels
from simfuse.fusion import FusionConfig, fuse_run, tune_weights
from simfuse.simsearch import topk_search
from simfuse.synth import SynthSpec, generate_corpus


def run_point(out_dir: Path, noise: float, seed: int, n_models: int = 5):
    spec = SynthSpec(
        n_queries=60, n_docs=2000, dim=24, n_models=n_models,
        relevant_per_query=4, noise=noise, seed=seed,
    )
    generate_corpus(spec, out_dir)
    qrels = read_qrels(out_dir / "qrels.tsv")
    all_models, query_ids, doc_ids = [], None, None
    for mi in range(n_models):
        queries, query_ids = read_embf(out_dir / f"model{mi}.queries.embf")
        docs, doc_ids = read_embf(out_dir / f"model{mi}.docs.embf")
        all_models.append(topk_search(queries, docs, 100))

    def run_map(weights):
        config = FusionConfig(weights=weights, M=100, k=20)
        run = fuse_run(all_models, query_ids, doc_ids, config)
        return map_at_k({r.query_id: list(r.doc_ids) for r in run}, qrels, 20)

    corners = [run_map(tuple(row)) for row in np.eye(n_models)]
    uniform = run_map((1.0 / n_models,) * n_models)
    tuned_weights, tuned = tune_weights(
        all_models, qrels, 6, FusionConfig(weights=(1,) * n_models, M=100, k=20),
        query_ids, doc_ids,
    )
    return corners, uniform, tuned, tuned_weights


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=None, help="work dir (default: temp)")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--noise", type=float, nargs="+",
                        default=[0.0, 0.5, 1.0, 2.0, 4.0, 8.0])
    args = parser.parse_args()

    base = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="noise_sweep_"))
    print(f"work dir: {base}")
    print(f"{'noise':>6}  {'best corner':>11}  {'uniform':>8}  {'tuned':>8}  weights")
    for noise in args.noise:
        corners, uniform, tuned, weights = run_point(base / f"n{noise}", noise, args.seed)
        print(
            f"{noise:6.1f}  {max(corners):11.4f}  {uniform:8.4f}  {tuned:8.4f}  "
            f"({', '.join(f'{w:.1f}' for w in weights)})"
        )


if __name__ == "__main__":
    main()

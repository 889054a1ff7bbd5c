"""Command-line pipeline: gen-synth, search, tune, fuse, submit, eval, ingest.

A manifest JSON names the per-model embedding files and shared paths:

    {
      "models": [{"name": "m0", "queries": "m0.queries.embf", "docs": "m0.docs.embf"}],
      "fusion_config": "fusion.json",
      "qrels": "qrels.tsv",
      "out_dir": "out"
    }

Relative paths resolve against the manifest's directory. Flags override
manifest fields. Commands exit 0 on success and nonzero with a single
``error: ...`` line on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import embedstore, evalkit, fusion, promptkit, simsearch, synth

DEFAULT_K = 20
DEFAULT_M = 1000


@dataclass(frozen=True)
class ModelEntry:
    name: str
    queries: Path
    docs: Path


@dataclass(frozen=True)
class PipelineManifest:
    models: tuple
    fusion_config: Path | None
    qrels: Path | None
    out_dir: Path

    @classmethod
    def load(cls, path) -> "PipelineManifest":
        path = Path(path)
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"cannot read manifest {path}: {e}") from e
        base = path.parent
        raw_models = obj.get("models")
        if not raw_models:
            raise ValueError("manifest must list at least one model")
        models = []
        for m in raw_models:
            try:
                models.append(
                    ModelEntry(m["name"], base / m["queries"], base / m["docs"])
                )
            except (KeyError, TypeError) as e:
                raise ValueError(f"bad model entry in manifest: {m!r}") from e
        if len({m.name for m in models}) != len(models):
            raise ValueError("duplicate model names in manifest")

        def opt(key):
            return base / obj[key] if obj.get(key) else None

        return cls(
            models=tuple(models),
            fusion_config=opt("fusion_config"),
            qrels=opt("qrels"),
            out_dir=base / obj.get("out_dir", "out"),
        )

    def run_path(self, model_name: str) -> Path:
        return self.out_dir / f"{model_name}.run.tsv"


def _load_config(manifest: PipelineManifest, override) -> fusion.FusionConfig:
    path = Path(override) if override else manifest.fusion_config
    if path is None:
        raise ValueError("no fusion config: set --config or manifest fusion_config")
    return fusion.FusionConfig.from_json(Path(path).read_text(encoding="utf-8"))


def _resolve_threads(value) -> int:
    if value is None:
        value = os.environ.get("SIMFUSE_THREADS")
    if value is None:
        return os.cpu_count() or 1
    n = int(value)
    if n < 1:
        raise ValueError(f"threads must be >= 1, got {n}")
    return n


def _check_id_tables(tables: dict[str, embedstore.IdTable], kind: str) -> embedstore.IdTable:
    names = list(tables)
    first = tables[names[0]]
    for name in names[1:]:
        if tables[name].ids != first.ids:
            raise ValueError(
                f"{kind} id table mismatch between models {names[0]!r} and {name!r}"
            )
    return first


def cmd_search(args) -> int:
    manifest = PipelineManifest.load(args.manifest)
    threads = _resolve_threads(args.threads)
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    first_doc_ids = None
    first_query_ids = None
    for model in manifest.models:
        try:
            queries, qids = embedstore.read_embf(model.queries)
            docs, dids = embedstore.read_embf(model.docs)
            if first_doc_ids is None:
                first_doc_ids, first_query_ids = dids, qids
            else:
                _check_id_tables(
                    {manifest.models[0].name: first_doc_ids, model.name: dids}, "doc"
                )
                _check_id_tables(
                    {manifest.models[0].name: first_query_ids, model.name: qids}, "query"
                )
            cands = simsearch.topk_search(queries, docs, args.M, n_threads=threads)
        except ValueError as e:
            raise ValueError(f"model {model.name!r}: {e}") from e
        simsearch.write_run(manifest.run_path(model.name), cands, qids, dids)
        print(f"run\t{model.name}\t{manifest.run_path(model.name)}")
    return 0


def _load_run_candidates(manifest: PipelineManifest, m_depth: int):
    """Read per-model run files back into index-space candidate sets."""
    doc_ids = embedstore.read_ids(str(manifest.models[0].docs) + ".ids")
    doc_pos = {did: i for i, did in enumerate(doc_ids.ids)}
    all_models = []
    query_order = None
    for model in manifest.models:
        path = manifest.run_path(model.name)
        if not path.exists():
            raise ValueError(f"missing run file for model {model.name!r}: {path}")
        order, by_query = simsearch.read_run(path)
        if query_order is None:
            query_order = order
        elif order != query_order:
            raise ValueError(
                f"query-set mismatch between model {manifest.models[0].name!r} "
                f"and {model.name!r}"
            )
        cands = []
        for qi, qid in enumerate(order):
            ids, scores = by_query[qid]
            ids, scores = ids[:m_depth], scores[:m_depth]
            try:
                idx = np.asarray([doc_pos[d] for d in ids], dtype=np.int64)
            except KeyError as e:
                raise ValueError(
                    f"run file {path} references unknown doc id {e.args[0]!r}"
                ) from e
            cands.append(simsearch.CandidateSet(qi, idx, scores))
        all_models.append(cands)
    return query_order, doc_ids, all_models


def cmd_fuse(args) -> int:
    manifest = PipelineManifest.load(args.manifest)
    config = _load_config(manifest, args.config)
    query_order, doc_ids, all_models = _load_run_candidates(manifest, config.M)
    rankings = fusion.fuse_run(all_models, query_order, doc_ids, config)
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    fused_path = manifest.out_dir / "fused.run.tsv"
    submission_path = Path(args.out) if args.out else manifest.out_dir / "submission.txt"
    fusion.write_fused_run(rankings, fused_path)
    fusion.write_submission(rankings, submission_path, config.k)
    print(f"fused_run\t{fused_path}")
    print(f"submission\t{submission_path}")
    return 0


def cmd_tune(args) -> int:
    manifest = PipelineManifest.load(args.manifest)
    config = _load_config(manifest, args.config)
    qrels_path = Path(args.qrels) if args.qrels else manifest.qrels
    if qrels_path is None:
        raise ValueError("no qrels: set --qrels or manifest qrels")
    qrels = evalkit.read_qrels(qrels_path)
    threads = _resolve_threads(args.threads)
    query_order, doc_ids, all_models = _load_run_candidates(manifest, config.M)
    weights, score = fusion.tune_weights(
        all_models, qrels, args.resolution, config, query_order, doc_ids,
        n_threads=threads,
    )
    best = fusion.tuned_config(config, weights)
    out = Path(args.out) if args.out else manifest.out_dir / "tuned_config.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = json.loads(best.to_json())
    payload["validation_map"] = score
    out.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    print(f"weights\t{','.join(f'{w:.6f}' for w in weights)}")
    print(f"map@{config.k}\t{score:.6f}")
    print(f"config\t{out}")
    return 0


def cmd_eval(args) -> int:
    qrels = evalkit.read_qrels(args.qrels)
    if args.run:
        order, by_query = simsearch.read_run(args.run)
        run = {qid: by_query[qid][0] for qid in order}
    elif args.submission:
        if not args.query_ids:
            raise ValueError("--submission needs --query-ids (one query id per line)")
        qids = embedstore.read_ids(args.query_ids)
        run = evalkit.read_submission(args.submission, qids.ids)
    else:
        raise ValueError("eval needs --run or --submission")
    lines = [
        f"map@{args.k}\t{evalkit.map_at_k(run, qrels, args.k):.6f}",
        f"recall@{args.k}\t{evalkit.mean_recall_at_k(run, qrels, args.k):.6f}",
        f"queries\t{len(qrels)}",
    ]
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
    return 0


def cmd_submit(args) -> int:
    order, by_query = simsearch.read_run(args.run)
    rankings = [
        fusion.FusedRanking(
            qid,
            tuple(zip(by_query[qid][0][: args.k], by_query[qid][1][: args.k])),
        )
        for qid in order
    ]
    fusion.write_submission(rankings, args.out, args.k)
    print(f"submission\t{args.out}")
    return 0


def cmd_gen_synth(args) -> int:
    spec = synth.SynthSpec(
        n_queries=args.n_queries,
        n_docs=args.n_docs,
        dim=args.dim,
        n_models=args.n_models,
        relevant_per_query=args.relevant_per_query,
        noise=args.noise,
        seed=args.seed,
    )
    manifest_path = synth.generate_corpus(spec, args.out)
    print(f"manifest\t{manifest_path}")
    return 0


def cmd_ingest(args) -> int:
    out_lines = []
    if args.kind == "query":
        for rec in promptkit.read_query_jsonl(args.input):
            if args.tag_pattern or args.instruction_text:
                pattern = args.tag_pattern or promptkit.TAG_PATTERNS[args.tag]
                instruction = args.instruction_text or promptkit.INSTRUCTION_TEXTS[args.instruction]
                text = promptkit.render_query_prompt_custom(rec, pattern, instruction)
            else:
                text = promptkit.render_query_prompt(rec, args.tag, args.instruction)
            out_lines.append(json.dumps({"id": rec.id, "text": text}))
    else:
        for rec in promptkit.read_document_jsonl(args.input):
            out_lines.append(
                json.dumps({"id": rec.id, "text": promptkit.render_document(rec)})
            )
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(out_lines) + ("\n" if out_lines else ""))
    print(f"rendered\t{len(out_lines)}\t{args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simfuse",
        description="Multi-model dense-retrieval similarity fusion pipeline.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search", help="exact top-M search per model, writes run files")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--M", type=int, default=DEFAULT_M, help="retained candidates per query")
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_search)

    fp = sub.add_parser("fuse", help="fuse per-model runs into a submission")
    fp.add_argument("--manifest", required=True)
    fp.add_argument("--config", default=None, help="fusion config JSON override")
    fp.add_argument("--out", default=None, help="submission path override")
    fp.set_defaults(func=cmd_fuse)

    tp = sub.add_parser("tune", help="simplex-grid weight search against qrels")
    tp.add_argument("--manifest", required=True)
    tp.add_argument("--config", default=None)
    tp.add_argument("--qrels", default=None)
    tp.add_argument("--resolution", type=int, default=11, help="grid points per axis")
    tp.add_argument("--threads", type=int, default=None)
    tp.add_argument("--out", default=None, help="tuned config path")
    tp.set_defaults(func=cmd_tune)

    ep = sub.add_parser("eval", help="MAP/recall of a run or submission against qrels")
    ep.add_argument("--run", default=None)
    ep.add_argument("--submission", default=None)
    ep.add_argument("--query-ids", default=None)
    ep.add_argument("--qrels", required=True)
    ep.add_argument("--k", type=int, default=DEFAULT_K)
    ep.add_argument("--out", default=None)
    ep.set_defaults(func=cmd_eval)

    bp = sub.add_parser("submit", help="write a submission from a run file")
    bp.add_argument("--run", required=True)
    bp.add_argument("--k", type=int, default=DEFAULT_K)
    bp.add_argument("--out", required=True)
    bp.set_defaults(func=cmd_submit)

    gp = sub.add_parser("gen-synth", help="seeded synthetic corpus with planted relevance")
    gp.add_argument("--out", required=True)
    gp.add_argument("--n-queries", type=int, default=200)
    gp.add_argument("--n-docs", type=int, default=10000)
    gp.add_argument("--dim", type=int, default=64)
    gp.add_argument("--n-models", type=int, default=5)
    gp.add_argument("--relevant-per-query", type=int, default=5)
    gp.add_argument("--noise", type=float, default=1.0)
    gp.add_argument("--seed", type=int, default=42)
    gp.set_defaults(func=cmd_gen_synth)

    ip = sub.add_parser("ingest", help="render JSONL records to embedding-ready text")
    ip.add_argument("--input", required=True)
    ip.add_argument("--kind", choices=("query", "document"), required=True)
    ip.add_argument("--tag", type=int, default=1)
    ip.add_argument("--instruction", type=int, default=1)
    ip.add_argument("--tag-pattern", default=None,
                    help="experimental pattern with {title} and {body}, overrides --tag")
    ip.add_argument("--instruction-text", default=None,
                    help="experimental instruction text, overrides --instruction")
    ip.add_argument("--out", required=True)
    ip.set_defaults(func=cmd_ingest)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

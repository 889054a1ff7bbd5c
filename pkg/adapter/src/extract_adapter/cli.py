"""Command-line entry points: ``extract`` and ``verify-compat``."""

from __future__ import annotations

import argparse
import sys

from .compat import verify_compat
from .jobs import ExtractionJob, run_extraction


def build_extract_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="extract",
        description="Encode JSONL records into an EMBF embedding file.",
    )
    p.add_argument("--model", required=True, help="encoder name (or stub label)")
    p.add_argument("--input", required=True, help="JSONL records")
    p.add_argument("--kind", choices=("query", "document"), required=True)
    p.add_argument("--tag", type=int, default=1, help="tag format id (queries)")
    p.add_argument("--instruction", type=int, default=1, help="instruction id (queries)")
    p.add_argument(
        "--pooling", choices=("mean", "last_token"), default=None,
        help="override the model-default pooling",
    )
    p.add_argument("--max-length", type=int, default=None,
                   help="token budget; defaults to 32 for queries, 156 for documents")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--out", required=True, help="EMBF output path")
    p.add_argument("--stub", action="store_true",
                   help="use the deterministic stub encoder instead of loading a model")
    p.add_argument("--stub-dim", type=int, default=64)
    return p


def main(argv=None) -> int:
    args = build_extract_parser().parse_args(argv)
    job = ExtractionJob(
        model_name=args.model,
        input_path=args.input,
        kind=args.kind,
        out_path=args.out,
        tag_id=args.tag,
        instruction_id=args.instruction,
        pooling=args.pooling,
        max_length=args.max_length,
        batch_size=args.batch_size,
        stub=args.stub,
        stub_dim=args.stub_dim,
    )
    try:
        rows, dim = run_extraction(job)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"written\t{args.out}\trows={rows}\tdim={dim}\tpooling={job.effective_pooling}")
    return 0


def verify_main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="verify-compat",
        description="Check that EMBF files share row counts and ID tables.",
    )
    p.add_argument("files", nargs="+", help="two or more EMBF paths")
    args = p.parse_args(argv)
    try:
        report = verify_compat(args.files)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(report)
    return 0 if report.compatible else 1

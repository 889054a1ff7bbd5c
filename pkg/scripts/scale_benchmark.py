"""Benchmark the pipeline at its target corpus scale.

Generates a synthetic corpus at a fraction of the full 5,919 x 466,387
shape, then times search, fuse, and submit through the CLI and reports
wall time per stage plus the peak child RSS.

Usage: python scripts/scale_benchmark.py [--fraction 1.0] [--models 2]
"""

import argparse
import resource
import subprocess
import sys
import tempfile
import time
from pathlib import Path


def stage(label: str, *args) -> float:
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "simfuse", *map(str, args)],
                          capture_output=True, text=True)
    dt = time.perf_counter() - t0
    if proc.returncode != 0:
        sys.exit(f"{label} failed: {proc.stderr.strip()}")
    print(f"{label:>8}: {dt:7.1f} s")
    return dt


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--fraction", type=float, default=1.0,
                        help="scale factor on the full corpus shape")
    parser.add_argument("--models", type=int, default=2)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--m", type=int, default=1000)
    parser.add_argument("--out", default=None)
    parser.add_argument("--seed", type=int, default=20240601)
    args = parser.parse_args()

    n_queries = max(1, int(5919 * args.fraction))
    n_docs = max(100, int(466387 * args.fraction))
    base = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="scale_bench_"))
    print(f"corpus: {n_queries} queries x {n_docs} docs x dim {args.dim}, "
          f"{args.models} models -> {base}")

    stage("gen", "gen-synth", "--out", base, "--n-queries", n_queries,
          "--n-docs", n_docs, "--dim", args.dim, "--n-models", args.models,
          "--relevant-per-query", 5, "--noise", 1.0, "--seed", args.seed)
    total = stage("search", "search", "--manifest", base / "manifest.json", "--M", args.m)
    total += stage("fuse", "fuse", "--manifest", base / "manifest.json")
    total += stage("submit", "submit", "--run", base / "out" / "fused.run.tsv",
                   "--k", 20, "--out", base / "out" / "resubmit.txt")

    peak = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss * 1024 / 1e9
    print(f"search+fuse+submit: {total:.1f} s, peak child RSS {peak:.2f} GB")


if __name__ == "__main__":
    main()

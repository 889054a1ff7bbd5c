"""End-to-end walkthrough on a small synthetic corpus.

Runs gen-synth, search, tune, fuse, eval, and submit through the CLI in a
temp directory and echoes each command, so the output doubles as usage
documentation.

Usage: python scripts/pipeline_demo.py [--out DIR]
"""

import argparse
import subprocess
import sys
import tempfile
from pathlib import Path


def run(*args):
    cmd = [sys.executable, "-m", "simfuse", *map(str, args)]
    print(f"$ simfuse {' '.join(map(str, args))}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.stdout:
        print(proc.stdout, end="")
    if proc.returncode != 0:
        sys.exit(f"failed: {proc.stderr.strip()}")
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    base = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="simfuse_demo_"))

    run("gen-synth", "--out", base, "--n-queries", 50, "--n-docs", 1000,
        "--dim", 32, "--n-models", 3, "--relevant-per-query", 4,
        "--noise", 1.5, "--seed", 42)
    manifest = base / "manifest.json"
    run("search", "--manifest", manifest, "--M", 100)
    run("tune", "--manifest", manifest, "--resolution", 6)
    run("fuse", "--manifest", manifest, "--config", base / "out" / "tuned_config.json")
    run("eval", "--run", base / "out" / "fused.run.tsv", "--qrels", base / "qrels.tsv")
    run("submit", "--run", base / "out" / "fused.run.tsv", "--k", 20,
        "--out", base / "out" / "top20.txt")
    print(f"artifacts in {base}/out")


if __name__ == "__main__":
    main()

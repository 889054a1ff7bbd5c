"""Command-line behavior: wiring, overrides, exit codes, idempotence."""

import json
import subprocess
import sys

import pytest

from simfuse.cli import main
from simfuse.embedstore import EmbeddingMatrix, IdTable, write_embf
from simfuse.evalkit import read_qrels

import numpy as np


def run_cli(*argv):
    return main([str(a) for a in argv])


def run_proc(*argv):
    return subprocess.run(
        [sys.executable, "-m", "simfuse", *map(str, argv)],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert run_cli(
        "gen-synth", "--out", root, "--n-queries", 25, "--n-docs", 250,
        "--dim", 12, "--n-models", 2, "--relevant-per-query", 3,
        "--noise", 1.0, "--seed", 13,
    ) == 0
    assert run_cli("search", "--manifest", root / "manifest.json", "--M", 60) == 0
    return root


class TestSearch:
    def test_writes_one_run_per_model(self, corpus):
        for name in ("model0", "model1"):
            assert (corpus / "out" / f"{name}.run.tsv").exists()

    def test_run_depth_respected(self, corpus):
        lines = (corpus / "out" / "model0.run.tsv").read_text().splitlines()
        assert len(lines) == 25 * 60

    def test_doc_table_mismatch_rejected(self, tmp_path):
        rng = np.random.default_rng(0)

        def write_pair(name, doc_ids):
            q = EmbeddingMatrix(np.eye(2, dtype=np.float32), normalized=True)
            d = EmbeddingMatrix(np.eye(2, dtype=np.float32), normalized=True)
            write_embf(tmp_path / f"{name}.q.embf", q, IdTable(("qa", "qb")))
            write_embf(tmp_path / f"{name}.d.embf", d, IdTable(doc_ids))

        write_pair("m0", ("d1", "d2"))
        write_pair("m1", ("d1", "dX"))
        manifest = {
            "models": [
                {"name": "m0", "queries": "m0.q.embf", "docs": "m0.d.embf"},
                {"name": "m1", "queries": "m1.q.embf", "docs": "m1.d.embf"},
            ],
        }
        (tmp_path / "manifest.json").write_text(json.dumps(manifest))
        proc = run_proc("search", "--manifest", tmp_path / "manifest.json", "--M", 2)
        assert proc.returncode == 1
        assert "doc id table mismatch" in proc.stderr
        assert proc.stderr.count("\n") == 1  # single machine-parsable line

    def test_missing_manifest_is_error(self):
        proc = run_proc("search", "--manifest", "/nonexistent/manifest.json")
        assert proc.returncode == 1
        assert proc.stderr.startswith("error:")


class TestFuseAndSubmit:
    def test_fuse_writes_outputs(self, corpus):
        assert run_cli("fuse", "--manifest", corpus / "manifest.json") == 0
        submission = (corpus / "out" / "submission.txt").read_text().splitlines()
        assert len(submission) == 25
        assert all(len(line.split(" ")) == 20 for line in submission)

    def test_fuse_idempotent(self, corpus):
        run_cli("fuse", "--manifest", corpus / "manifest.json")
        first = (corpus / "out" / "submission.txt").read_bytes()
        run_cli("fuse", "--manifest", corpus / "manifest.json")
        assert (corpus / "out" / "submission.txt").read_bytes() == first

    def test_submit_matches_fuse(self, corpus, tmp_path):
        run_cli("fuse", "--manifest", corpus / "manifest.json")
        out = tmp_path / "sub.txt"
        assert run_cli(
            "submit", "--run", corpus / "out" / "fused.run.tsv", "--k", 20, "--out", out
        ) == 0
        assert out.read_bytes() == (corpus / "out" / "submission.txt").read_bytes()

    def test_submit_short_run_errors(self, corpus, tmp_path):
        proc = run_proc(
            "submit", "--run", corpus / "out" / "model0.run.tsv", "--k", 100,
            "--out", tmp_path / "s.txt",
        )
        assert proc.returncode == 1
        assert "short ranking" in proc.stderr


class TestTune:
    def test_tuned_config_roundtrips_into_fuse(self, corpus, tmp_path):
        tuned = tmp_path / "tuned.json"
        assert run_cli(
            "tune", "--manifest", corpus / "manifest.json", "--resolution", 3,
            "--out", tuned,
        ) == 0
        payload = json.loads(tuned.read_text())
        assert "validation_map" in payload
        assert len(payload["weights"]) == 2
        assert run_cli(
            "fuse", "--manifest", corpus / "manifest.json", "--config", tuned
        ) == 0

    def test_resolution_one_errors(self, corpus):
        proc = run_proc(
            "tune", "--manifest", corpus / "manifest.json", "--resolution", 1
        )
        assert proc.returncode == 1
        assert "resolution" in proc.stderr


class TestEval:
    def test_hand_fixture_via_files(self, tmp_path):
        run = tmp_path / "r.tsv"
        run.write_text("q1\td1\t1\t0.900000\nq1\td2\t2\t0.500000\nq1\td3\t3\t0.100000\n")
        qrels = tmp_path / "q.tsv"
        qrels.write_text("q1\td1\nq1\td3\n")
        out = tmp_path / "report.txt"
        assert run_cli("eval", "--run", run, "--qrels", qrels, "--out", out) == 0
        report = dict(
            line.split("\t") for line in out.read_text().splitlines()
        )
        assert report["map@20"] == "0.833333"

    def test_submission_eval_needs_query_ids(self, tmp_path):
        sub = tmp_path / "s.txt"
        sub.write_text("d1 d2\n")
        qrels = tmp_path / "q.tsv"
        qrels.write_text("q1\td1\n")
        proc = run_proc("eval", "--submission", sub, "--qrels", qrels)
        assert proc.returncode == 1
        assert "query-ids" in proc.stderr

    def test_submission_eval_with_ids(self, tmp_path):
        sub = tmp_path / "s.txt"
        sub.write_text("d1 d2\n")
        (tmp_path / "q.ids").write_text("q1")
        qrels = tmp_path / "q.tsv"
        qrels.write_text("q1\td1\n")
        assert run_cli(
            "eval", "--submission", sub, "--query-ids", tmp_path / "q.ids",
            "--qrels", qrels, "--k", 2,
        ) == 0

    def test_no_overlap_errors(self, corpus, tmp_path):
        qrels = tmp_path / "other.tsv"
        qrels.write_text("zz\td00000000\n")
        proc = run_proc(
            "eval", "--run", corpus / "out" / "model0.run.tsv", "--qrels", qrels
        )
        assert proc.returncode == 1


class TestGenSynth:
    def test_deterministic_across_invocations(self, tmp_path):
        args = (
            "gen-synth", "--n-queries", 5, "--n-docs", 50, "--dim", 8,
            "--n-models", 1, "--relevant-per-query", 2, "--seed", 99,
        )
        run_cli(*args, "--out", tmp_path / "a")
        run_cli(*args, "--out", tmp_path / "b")
        for name in ("model0.docs.embf", "model0.queries.embf", "qrels.tsv", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_invalid_shape_errors(self):
        proc = run_proc("gen-synth", "--out", "/tmp/x", "--dim", 1)
        assert proc.returncode == 1

    def test_qrels_parse(self, corpus):
        qrels = read_qrels(corpus / "qrels.tsv")
        assert len(qrels) == 25


class TestIngest:
    def test_query_rendering(self, tmp_path):
        src = tmp_path / "q.jsonl"
        src.write_text('{"id": "q1", "title": "T", "body": "B"}\n')
        out = tmp_path / "rendered.jsonl"
        assert run_cli(
            "ingest", "--input", src, "--kind", "query", "--tag", 4,
            "--instruction", 2, "--out", out,
        ) == 0
        obj = json.loads(out.read_text())
        assert obj["text"].endswith("Query: Title: T\nContent: B")

    def test_document_rendering(self, tmp_path):
        src = tmp_path / "d.jsonl"
        src.write_text('{"id": "d1", "title": "P", "abstract": "A"}\n')
        out = tmp_path / "rendered.jsonl"
        assert run_cli("ingest", "--input", src, "--kind", "document", "--out", out) == 0
        assert json.loads(out.read_text())["text"] == "P\nA"

    def test_custom_template_override(self, tmp_path):
        src = tmp_path / "q.jsonl"
        src.write_text('{"id": "q1", "title": "T", "body": "B"}\n')
        out = tmp_path / "rendered.jsonl"
        assert run_cli(
            "ingest", "--input", src, "--kind", "query",
            "--tag-pattern", "Q: {title} | {body}",
            "--instruction-text", "Find the paper.",
            "--out", out,
        ) == 0
        assert json.loads(out.read_text())["text"] == (
            "Instruct: Find the paper.\nQuery: Q: T | B"
        )

    def test_bad_custom_pattern_errors(self, tmp_path):
        src = tmp_path / "q.jsonl"
        src.write_text('{"id": "q1", "title": "T", "body": "B"}\n')
        proc = run_proc(
            "ingest", "--input", src, "--kind", "query",
            "--tag-pattern", "no placeholders", "--out", tmp_path / "o.jsonl",
        )
        assert proc.returncode == 1
        assert "{title}" in proc.stderr


class TestThreadsEnv:
    def test_env_fallback(self, monkeypatch, tmp_path):
        run_cli(
            "gen-synth", "--out", tmp_path, "--n-queries", 4, "--n-docs", 40,
            "--dim", 8, "--n-models", 1, "--relevant-per-query", 2, "--seed", 1,
        )
        monkeypatch.setenv("SIMFUSE_THREADS", "2")
        assert run_cli("search", "--manifest", tmp_path / "manifest.json", "--M", 30) == 0

    def test_bad_env_value_errors(self, tmp_path):
        run_cli(
            "gen-synth", "--out", tmp_path, "--n-queries", 4, "--n-docs", 40,
            "--dim", 8, "--n-models", 1, "--relevant-per-query", 2, "--seed", 1,
        )
        proc = subprocess.run(
            [sys.executable, "-m", "simfuse", "search", "--manifest",
             str(tmp_path / "manifest.json"), "--M", "30"],
            capture_output=True, text=True,
            env={"SIMFUSE_THREADS": "bad", "PATH": "/usr/bin:/bin"},
        )
        assert proc.returncode == 1

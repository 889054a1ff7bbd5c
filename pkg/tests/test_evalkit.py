"""Metric definitions against hand values and a prefix-enumeration oracle."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simfuse.evalkit import (
    average_precision_at_k,
    map_at_k,
    mean_recall_at_k,
    read_qrels,
    recall_at_k,
    write_qrels,
)


def oracle_ap_at_k(ranked, relevant, k):
    """Enumerate every prefix precision explicitly."""
    if not relevant:
        return 0.0
    total = 0.0
    for i in range(1, min(k, len(ranked)) + 1):
        if ranked[i - 1] in relevant:
            prefix = ranked[:i]
            total += sum(1 for d in prefix if d in relevant) / i
    return total / min(len(relevant), k)


def random_instance(seed):
    gen = np.random.default_rng(seed)
    n_docs = int(gen.integers(1, 50))
    docs = [f"d{i}" for i in range(n_docs)]
    ranked = list(gen.permutation(docs))
    n_rel = int(gen.integers(0, min(10, n_docs) + 1))
    relevant = set(gen.choice(docs, size=n_rel, replace=False)) if n_rel else set()
    return ranked, relevant


class TestAveragePrecision:
    def test_hand_fixture(self):
        ap = average_precision_at_k(["d1", "d2", "d3"], {"d1", "d3"}, 20)
        assert ap == pytest.approx(0.8333333333, abs=1e-9)

    def test_perfect_ranking(self):
        assert average_precision_at_k(["d1", "d2"], {"d1", "d2"}, 20) == 1.0

    def test_empty_relevant_scores_zero(self):
        assert average_precision_at_k(["d1", "d2"], set(), 20) == 0.0

    def test_duplicate_doc_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            average_precision_at_k(["d1", "d1"], {"d1"}, 5)

    def test_k_below_one(self):
        with pytest.raises(ValueError, match="k"):
            average_precision_at_k(["d1"], {"d1"}, 0)

    def test_ap_one_iff_top_slots_relevant(self):
        assert average_precision_at_k(["r1", "r2", "x"], {"r1", "r2"}, 20) == 1.0
        assert average_precision_at_k(["r1", "x", "r2"], {"r1", "r2"}, 20) < 1.0

    @given(seed=st.integers(0, 2**31), k=st.integers(1, 60))
    @settings(max_examples=200)
    def test_matches_prefix_oracle(self, seed, k):
        ranked, relevant = random_instance(seed)
        got = average_precision_at_k(ranked, relevant, k)
        assert abs(got - oracle_ap_at_k(ranked, relevant, k)) <= 1e-12

    @given(seed=st.integers(0, 2**31))
    def test_monotone_in_k_past_relevant_count(self, seed):
        # the min(|relevant|, k) denominator grows with k below |relevant|,
        # so monotonicity only holds once k reaches the relevant count
        ranked, relevant = random_instance(seed)
        start = max(1, len(relevant))
        values = [average_precision_at_k(ranked, relevant, k) for k in range(start, 60)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_non_monotone_below_relevant_count(self):
        # documented consequence of the denominator convention
        ranked = ["r1", "r2", "x1", "x2"]
        relevant = {"r1", "r2", "r3"}
        assert average_precision_at_k(ranked, relevant, 2) == 1.0
        assert average_precision_at_k(ranked, relevant, 3) == pytest.approx(2 / 3)


class TestRecall:
    def test_hand_fixture(self):
        r = recall_at_k(["d1", "d2", "d3"], {"d1", "d3", "d9"}, 3)
        assert r == pytest.approx(2 / 3)

    def test_all_found(self):
        assert recall_at_k(["d1", "d2"], {"d1", "d2"}, 5) == 1.0

    def test_no_overlap(self):
        assert recall_at_k(["d1"], {"x"}, 5) == 0.0

    def test_empty_relevant_errors(self):
        with pytest.raises(ValueError, match="empty relevant"):
            recall_at_k(["d1"], set(), 5)

    @given(seed=st.integers(0, 2**31))
    def test_monotone_in_k(self, seed):
        ranked, relevant = random_instance(seed)
        if not relevant:
            relevant = {ranked[0]}
        values = [recall_at_k(ranked, relevant, k) for k in range(1, 55)]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestMap:
    def test_mean_of_aps(self):
        run = {"q1": ["a"], "q2": ["x", "a"]}
        qrels = {"q1": {"a"}, "q2": {"a"}}
        assert map_at_k(run, qrels, 20) == pytest.approx(0.75)

    def test_missing_query_counts_zero(self):
        run = {"q1": ["a"]}
        qrels = {"q1": {"a"}, "q2": {"b"}}
        assert map_at_k(run, qrels, 20) == pytest.approx(0.5)

    def test_single_query(self):
        run = {"q1": ["d1", "d2", "d3"]}
        qrels = {"q1": {"d1", "d3"}}
        assert map_at_k(run, qrels, 20) == pytest.approx(0.8333333333)

    def test_query_order_invariant(self):
        qrels = {"q1": {"a"}, "q2": {"b"}, "q3": {"c"}}
        run = {"q3": ["c"], "q1": ["x", "a"], "q2": ["b"]}
        reordered = {k: run[k] for k in ("q1", "q2", "q3")}
        assert map_at_k(run, qrels, 5) == map_at_k(reordered, qrels, 5)

    def test_no_overlap_errors(self):
        with pytest.raises(ValueError, match="overlap"):
            map_at_k({"q1": ["a"]}, {"q9": {"a"}}, 5)

    def test_empty_qrels_errors(self):
        with pytest.raises(ValueError, match="empty qrels"):
            map_at_k({"q1": ["a"]}, {}, 5)


class TestQrelsIo:
    def test_roundtrip(self, tmp_path):
        qrels = {"q1": {"d1", "d2"}, "q2": {"d9"}}
        path = tmp_path / "qrels.tsv"
        write_qrels(qrels, path)
        assert read_qrels(path) == qrels

    def test_format(self, tmp_path):
        path = tmp_path / "qrels.tsv"
        write_qrels({"q2": {"b"}, "q1": {"a"}}, path)
        assert path.read_text() == "q1\ta\nq2\tb\n"

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("q1 d1\n")
        with pytest.raises(ValueError, match="TAB"):
            read_qrels(path)

    def test_mean_recall(self):
        run = {"q1": ["a", "x"], "q2": ["y"]}
        qrels = {"q1": {"a", "b"}, "q2": {"y"}}
        assert mean_recall_at_k(run, qrels, 2) == pytest.approx(0.75)

"""Stub encoder determinism and batching."""

import numpy as np
import pytest

from extract_adapter.stub import StubEncoder


class TestStubEncoder:
    def test_deterministic_per_text_and_model(self):
        enc = StubEncoder("m1", dim=8)
        h1, m1 = enc.encode_batch(["hello world"], 32)
        h2, m2 = enc.encode_batch(["hello world"], 32)
        np.testing.assert_array_equal(h1, h2)
        np.testing.assert_array_equal(m1, m2)

    def test_models_disagree(self):
        a, _ = StubEncoder("m1", dim=8).encode_batch(["hello world"], 32)
        b, _ = StubEncoder("m2", dim=8).encode_batch(["hello world"], 32)
        assert not np.allclose(a, b)

    def test_truncation_at_max_length(self):
        enc = StubEncoder("m", dim=4)
        hidden, mask = enc.encode_batch(["a b c d e f"], 3)
        assert hidden.shape == (1, 3, 4)
        assert mask.tolist() == [[1, 1, 1]]

    def test_batch_padding_and_mask(self):
        enc = StubEncoder("m", dim=4)
        hidden, mask = enc.encode_batch(["one", "one two three"], 32)
        assert hidden.shape == (2, 3, 4)
        assert mask.tolist() == [[1, 0, 0], [1, 1, 1]]
        assert np.all(hidden[0, 1:] == 0)

    def test_empty_text_gets_one_token(self):
        hidden, mask = StubEncoder("m", dim=4).encode_batch([""], 32)
        assert hidden.shape == (1, 1, 4)
        assert mask.tolist() == [[1]]

    def test_batch_independent_of_neighbors(self):
        enc = StubEncoder("m", dim=6)
        alone, _ = enc.encode_batch(["target text"], 32)
        together, mask = enc.encode_batch(["target text", "padding neighbor words"], 32)
        np.testing.assert_array_equal(alone[0], together[0, :2])

    def test_dim_floor(self):
        with pytest.raises(ValueError, match="dim"):
            StubEncoder("m", dim=1)

"""Deterministic stand-in encoder for pipeline runs without model weights.

Hidden states are drawn from a PCG64 generator seeded by a SHA-256 hash of
(model name, text), so output depends only on the inputs: same text, same
model, same bytes, on any machine. Tokenization is whitespace splitting,
which is enough to exercise truncation and pooling.
"""

from __future__ import annotations

import hashlib

import numpy as np


class StubEncoder:
    def __init__(self, model_name: str, dim: int = 64):
        if dim < 2:
            raise ValueError(f"stub dim must be >= 2, got {dim}")
        self.model_name = model_name
        self.dim = dim

    def _token_count(self, text: str, max_length: int) -> int:
        return max(1, min(len(text.split()), max_length))

    def _states(self, text: str, max_length: int) -> np.ndarray:
        digest = hashlib.sha256(
            self.model_name.encode("utf-8") + b"\x00" + text.encode("utf-8")
        ).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng(seed)
        return rng.standard_normal(
            (self._token_count(text, max_length), self.dim), dtype=np.float32
        )

    def encode_batch(self, texts: list[str], max_length: int) -> tuple[np.ndarray, np.ndarray]:
        """Hidden states padded to the batch's longest sequence, plus mask."""
        states = [self._states(t, max_length) for t in texts]
        longest = max(s.shape[0] for s in states)
        hidden = np.zeros((len(states), longest, self.dim), dtype=np.float32)
        mask = np.zeros((len(states), longest), dtype=np.int64)
        for i, s in enumerate(states):
            hidden[i, : s.shape[0]] = s
            mask[i, : s.shape[0]] = 1
        return hidden, mask

"""Pooling of final-layer hidden states into one vector per text."""

from __future__ import annotations

import numpy as np


def mean_pool(hidden: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Average hidden states over non-padding positions.

    hidden: (batch, tokens, dim); mask: (batch, tokens), nonzero = real token.
    """
    mask = np.asarray(mask, dtype=np.float32)
    counts = mask.sum(axis=1)
    if (counts == 0).any():
        raise ValueError("a sequence has no non-padding tokens")
    summed = (np.asarray(hidden, dtype=np.float32) * mask[:, :, None]).sum(axis=1)
    return summed / counts[:, None]


def last_token_pool(hidden: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Hidden state at the last non-padding position of each sequence.

    Works for either padding side: the position is located from the mask,
    not assumed to be counts - 1.
    """
    mask = np.asarray(mask).astype(bool)
    if (~mask).all(axis=1).any():
        raise ValueError("a sequence has no non-padding tokens")
    last = mask.shape[1] - 1 - np.argmax(mask[:, ::-1], axis=1)
    rows = np.arange(hidden.shape[0])
    return np.asarray(hidden, dtype=np.float32)[rows, last]


POOLERS = {"mean": mean_pool, "last_token": last_token_pool}


def default_pooling(model_name: str) -> str:
    """GritLM models pool by mean; the Mistral-family encoders use last token."""
    return "mean" if "gritlm" in model_name.lower() else "last_token"


def l2_normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,ij->i", vectors, vectors, dtype=np.float64))
    bad = np.flatnonzero(norms < 1e-12)
    if bad.size:
        raise ValueError(f"zero-norm embedding at row {int(bad[0])}")
    return vectors * (1.0 / norms).astype(np.float32)[:, None]

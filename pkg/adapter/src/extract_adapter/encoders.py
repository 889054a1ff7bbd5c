"""Hugging Face encoder loading, kept behind a lazy import.

Only imported when a job runs without --stub; torch and transformers are
an optional extra, and any load problem surfaces as one EncoderLoadError.
"""

from __future__ import annotations

import numpy as np


class EncoderLoadError(RuntimeError):
    pass


class HFEncoder:
    """Final-layer hidden states from an AutoModel, batch at a time."""

    def __init__(self, model_name: str):
        try:
            import torch  # noqa: F401
            from transformers import AutoModel, AutoTokenizer
        except ImportError as e:
            raise EncoderLoadError(f"encoder load failure: {e}") from e
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_name)
            self.model = AutoModel.from_pretrained(model_name)
        except Exception as e:  # transformers raises many types here
            raise EncoderLoadError(f"encoder load failure: {model_name}: {e}") from e
        self.model.eval()

    def encode_batch(self, texts: list[str], max_length: int) -> tuple[np.ndarray, np.ndarray]:
        import torch

        batch = self.tokenizer(
            texts,
            padding=True,
            truncation=True,
            max_length=max_length,
            return_tensors="pt",
        )
        with torch.no_grad():
            out = self.model(**batch)
        hidden = out.last_hidden_state.float().cpu().numpy()
        mask = batch["attention_mask"].cpu().numpy()
        return hidden, mask

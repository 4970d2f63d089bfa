"""Embedding model wrappers.

A model object needs three things: `model_id` (the identity string echoed in
every response), `dim`, and `encode(texts) -> list of lists of floats` that
is deterministic for a fixed model version (inference only, no state).
"""

from __future__ import annotations

DEFAULT_MODEL_ID = "sentence-transformers/all-mpnet-base-v2"


class SentenceTransformerModel:
    """Wraps a sentence-transformers model; imported lazily so the service
    package stays importable without the model extra installed."""

    def __init__(self, model_id: str = DEFAULT_MODEL_ID):
        from sentence_transformers import SentenceTransformer

        self.model_id = model_id
        self._model = SentenceTransformer(model_id)
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> list[list[float]]:
        if not texts:
            return []
        vectors = self._model.encode(texts, convert_to_numpy=True)
        return [[float(x) for x in vector] for vector in vectors]

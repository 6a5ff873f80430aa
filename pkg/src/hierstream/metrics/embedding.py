"""Text embedders behind one interface: a deterministic hashed bag-of-words
mock for offline runs and tests, and a client for OpenAI-compatible
``/v1/embeddings`` endpoints. All embedders return unit-norm vectors."""

from __future__ import annotations

import re
import zlib
from typing import Protocol, Sequence

import numpy as np

from .._http import HttpLimits, JsonHttpClient

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class Embedder(Protocol):
    dim: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


class HashedBagOfWordsEmbedder:
    """L2-normalized hashed bag of words over lowercased tokens.

    Deterministic across processes (crc32, not the salted builtin hash).
    Token-free texts map to a reserved coordinate so cosine(v, v) is
    always 1.
    """

    def __init__(self, dim: int = 256):
        self.dim = dim

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            tokens = _TOKEN_RE.findall(text.lower())
            if not tokens:
                tokens = ["<empty>"]
            for tok in tokens:
                out[row, zlib.crc32(tok.encode("utf-8")) % self.dim] += 1.0
        norms = np.linalg.norm(out, axis=1, keepdims=True)
        return out / norms


class HttpEmbedder:
    """Embeddings via an OpenAI-compatible endpoint; vectors are normalized
    on arrival."""

    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 limits: HttpLimits = HttpLimits(), dim: int | None = None):
        self.model = model
        self.dim = dim or 0
        self._client = JsonHttpClient(base_url, api_key=api_key, limits=limits)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        reply = self._client.post_json(
            "/embeddings", {"model": self.model, "input": list(texts)}
        )
        rows = sorted(reply["data"], key=lambda d: d["index"])
        vectors = np.array([r["embedding"] for r in rows], dtype=np.float64)
        if vectors.shape[0] != len(texts):
            raise ValueError(
                f"endpoint returned {vectors.shape[0]} embeddings for {len(texts)} texts"
            )
        self.dim = vectors.shape[1]
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return vectors / norms

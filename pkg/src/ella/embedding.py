"""Dense-vector side: provider protocol, deterministic mock, cosine, store.

The two embedding roles ("grounder" for sentence/article attribution,
"case_retriever" for case search) sit behind the same wire protocol:
POST {endpoint}/embed with {"texts": [...]} answering {"vectors": [[...]]}.
With endpoint "mock" everything runs offline on a hashed-bigram embedding.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import (
    DimensionMismatch,
    ProviderError,
    ProviderTimeout,
    ProviderUnreachable,
)
from .models import RetrievalHit, as_hits
from .textseg import tokenize

MOCK_DIMENSION = 256
MOCK_ENDPOINT = "mock"

ROLE_GROUNDER = "grounder"
ROLE_CASE_RETRIEVER = "case_retriever"

_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_UINT64_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class EmbeddingProviderRef:
    """Which embedding model to call, for which role, at which dimension."""

    role: str
    endpoint: str = MOCK_ENDPOINT
    dimension: int = MOCK_DIMENSION

    @property
    def is_mock(self) -> bool:
        return self.endpoint == MOCK_ENDPOINT


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV64_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV64_PRIME) & _UINT64_MASK
    return h


def mock_embed(text: str) -> np.ndarray:
    """Hashed bag-of-bigrams embedding: unit norm, 256-d, fully deterministic.

    Token-free text maps to the zero vector. Identical texts map to identical
    vectors, which makes threshold tests exact.
    """
    vec = np.zeros(MOCK_DIMENSION, dtype=np.float64)
    for token in tokenize(text):
        vec[fnv1a64(token.encode("utf-8")) % MOCK_DIMENSION] += 1.0
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0.0 else vec


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    if u.shape != v.shape:
        raise DimensionMismatch(f"vector dimensions differ: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return float(np.dot(u, v)) / (norm_u * norm_v)


class VectorStore:
    """Exact top-k cosine retrieval over (doc_id, vector) entries."""

    def __init__(self, entries: list[tuple[str, np.ndarray]]):
        seen: set[str] = set()
        dimension: int | None = None
        for doc_id, vec in entries:
            if doc_id in seen:
                raise ValueError(f"duplicate doc id in vector store: {doc_id}")
            seen.add(doc_id)
            if dimension is None:
                dimension = vec.shape[0]
            elif vec.shape[0] != dimension:
                raise DimensionMismatch(
                    f"store entry {doc_id} has dimension {vec.shape[0]}, expected {dimension}"
                )
        self.entries = list(entries)
        self.dimension = dimension if dimension is not None else 0

    def __len__(self) -> int:
        return len(self.entries)

    def top_k(self, query_vec: np.ndarray, k: int) -> list[RetrievalHit]:
        """Exact scan; score descending, doc id ascending on ties."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.entries and query_vec.shape[0] != self.dimension:
            raise DimensionMismatch(
                f"query dimension {query_vec.shape[0]} vs store dimension {self.dimension}"
            )
        scored = [(doc_id, cosine(query_vec, vec)) for doc_id, vec in self.entries]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return as_hits(scored[:k])


def store_top_k(store: VectorStore, query_vec: np.ndarray, k: int) -> list[RetrievalHit]:
    return store.top_k(query_vec, k)


class EmbeddingClient:
    """Caller side of the embedding wire protocol, with a mock fast path.

    At most `max_in_flight` HTTP requests run concurrently per client;
    output order always matches input order.
    """

    def __init__(
        self,
        ref: EmbeddingProviderRef,
        transport: httpx.BaseTransport | None = None,
        timeout: float = 30.0,
        max_in_flight: int = 4,
    ):
        self.ref = ref
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._client: httpx.Client | None = None
        if not ref.is_mock:
            self._client = httpx.Client(transport=transport, timeout=timeout)

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        """One vector per text, in order, unit-normalized (zero stays zero)."""
        if not texts:
            raise ValueError("texts must be a non-empty list")
        if self.ref.is_mock:
            return [mock_embed(text) for text in texts]
        assert self._client is not None
        url = self.ref.endpoint.rstrip("/") + "/embed"
        try:
            with self._semaphore:
                response = self._client.post(url, json={"texts": texts})
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"embedding provider timed out: {exc}") from exc
        except httpx.TransportError as exc:
            raise ProviderUnreachable(f"embedding provider unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text)
        try:
            vectors = response.json()["vectors"]
        except (KeyError, ValueError) as exc:
            raise ProviderError(response.status_code, f"bad response body: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(
                response.status_code, f"expected {len(texts)} vectors, got {len(vectors)}"
            )
        return [self._normalize(values) for values in vectors]

    def _normalize(self, values: list[float]) -> np.ndarray:
        vec = np.asarray(values, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != self.ref.dimension:
            raise DimensionMismatch(
                f"provider returned dimension {vec.shape}, configured {self.ref.dimension}"
            )
        if not np.all(np.isfinite(vec)):
            raise ProviderError(200, "provider returned non-finite vector values")
        norm = float(np.linalg.norm(vec))
        return vec / norm if norm > 0.0 else vec

    def close(self) -> None:
        if self._client is not None:
            self._client.close()


def embed_batch(ref: EmbeddingProviderRef, texts: list[str]) -> list[np.ndarray]:
    """One-shot convenience for code that does not hold a client."""
    client = EmbeddingClient(ref)
    try:
        return client.embed_batch(texts)
    finally:
        client.close()

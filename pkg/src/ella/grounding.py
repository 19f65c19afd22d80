"""Attribute response sentences to the statutes and interpretations behind them.

Every sentence of an LLM response is embedded and compared against every
article and judicial interpretation in the corpus; sources whose cosine
similarity reaches thr1_grounding become the sentence's legal bases. The
threshold comparison is >= so that text identical to a source always grounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RetrievalConfig
from .corpus import CorpusBundle
from .embedding import EmbeddingClient, EmbeddingProviderRef, cosine
from .textseg import Sentence, split_sentences

EMBED_BATCH_SIZE = 64

BASIS_ARTICLE = "article"
BASIS_INTERPRETATION = "interpretation"


@dataclass(frozen=True)
class LegalBasis:
    kind: str
    doc_id: str
    similarity: float


@dataclass(frozen=True)
class GroundedSentence:
    sentence: Sentence
    bases: tuple[LegalBasis, ...]


class Grounder:
    """Grounds responses against a fixed corpus with cached source vectors."""

    def __init__(self, bundle: CorpusBundle, client: EmbeddingClient, cfg: RetrievalConfig):
        self.cfg = cfg
        self._client = client
        self._sources: list[tuple[str, str]] = [
            (BASIS_ARTICLE, article.id) for article in bundle.articles
        ] + [
            (BASIS_INTERPRETATION, interp.id) for interp in bundle.interpretations
        ]
        texts = [article.text for article in bundle.articles] + [
            interp.text for interp in bundle.interpretations
        ]
        self._source_vectors = embed_in_batches(client, texts)

    def ground(self, response_text: str) -> list[GroundedSentence]:
        """One GroundedSentence per response sentence, in sentence order."""
        sentences = split_sentences(response_text)
        if not sentences:
            return []
        vectors = embed_in_batches(self._client, [s.text for s in sentences])
        return [
            GroundedSentence(sentence, self._bases_for(vec))
            for sentence, vec in zip(sentences, vectors)
        ]

    def _bases_for(self, sentence_vec: np.ndarray) -> tuple[LegalBasis, ...]:
        threshold = self.cfg.thr1_grounding
        kept = []
        for (kind, doc_id), source_vec in zip(self._sources, self._source_vectors):
            similarity = cosine(sentence_vec, source_vec)
            if similarity >= threshold:
                kept.append(LegalBasis(kind, doc_id, similarity))
        kept.sort(key=lambda basis: (-basis.similarity, basis.doc_id, basis.kind))
        return tuple(kept)


def embed_in_batches(client: EmbeddingClient, texts: list[str]) -> list[np.ndarray]:
    """Embed texts in provider-sized chunks, preserving order."""
    vectors: list[np.ndarray] = []
    for start in range(0, len(texts), EMBED_BATCH_SIZE):
        vectors.extend(client.embed_batch(texts[start : start + EMBED_BATCH_SIZE]))
    return vectors


def ground_response(
    response_text: str,
    bundle: CorpusBundle,
    provider: EmbeddingProviderRef,
    cfg: RetrievalConfig,
) -> list[GroundedSentence]:
    """One-shot grounding; builds the source cache for a single call."""
    client = EmbeddingClient(provider)
    try:
        return Grounder(bundle, client, cfg).ground(response_text)
    finally:
        client.close()


def as_sentence_payload(grounded: GroundedSentence) -> dict:
    """Wire form used by the service and conversation log."""
    return {
        "index": grounded.sentence.index,
        "text": grounded.sentence.text,
        "char_span": list(grounded.sentence.char_span),
        "bases": [
            {"kind": b.kind, "doc_id": b.doc_id, "similarity": b.similarity}
            for b in grounded.bases
        ],
    }

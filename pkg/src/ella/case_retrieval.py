"""Case search pipeline: dense retrieval, sentence highlighting, re-rank.

Top k2_cases candidates come from the case vector store. Each candidate's
trial-proceeding sentences are compared against the query embedding, and
sentences at or above thr2_highlight become highlights. Candidates are then
re-ranked by highlight count and truncated to k3_cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RetrievalConfig
from .corpus import CorpusBundle, LegalCase
from .embedding import EmbeddingClient, VectorStore, cosine
from .errors import EmptyQuery
from .grounding import embed_in_batches
from .models import RetrievalHit
from .textseg import Sentence, split_sentences

PROCEEDING_SECTION = "proceeding"


@dataclass(frozen=True)
class Highlight:
    section: str
    sentence: Sentence
    similarity: float


@dataclass(frozen=True)
class HighlightedCase:
    case_id: str
    retrieval_score: float
    highlights: tuple[Highlight, ...]
    final_rank: int

    @property
    def highlight_count(self) -> int:
        return len(self.highlights)


def case_text(case: LegalCase) -> str:
    """The text a case is embedded under: all sections, in order."""
    return "\n".join(section.text for section in case.sections)


def build_case_store(bundle: CorpusBundle, client: EmbeddingClient) -> VectorStore:
    texts = [case_text(case) for case in bundle.cases]
    vectors = embed_in_batches(client, texts) if texts else []
    return VectorStore([(case.id, vec) for case, vec in zip(bundle.cases, vectors)])


def retrieve_cases(
    query_vec: np.ndarray, store: VectorStore, cfg: RetrievalConfig
) -> list[RetrievalHit]:
    """Top min(k2_cases, store size) cases by cosine; ties by id."""
    if len(store) == 0:
        return []
    return store.top_k(query_vec, min(cfg.k2_cases, len(store)))


def highlight_sentences(case: LegalCase) -> list[tuple[str, Sentence]]:
    """(section name, sentence) pairs eligible for highlighting.

    The proceeding section is the unit of interest when present; otherwise
    every section contributes, in document order.
    """
    sections = [s for s in case.sections if s.name == PROCEEDING_SECTION]
    if not sections:
        sections = list(case.sections)
    pairs: list[tuple[str, Sentence]] = []
    for section in sections:
        for sentence in split_sentences(section.text):
            pairs.append((section.name, sentence))
    return pairs


def highlight_case(
    query_vec: np.ndarray,
    case: LegalCase,
    client: EmbeddingClient,
    cfg: RetrievalConfig,
) -> list[Highlight]:
    """Sentences of the case whose similarity to the query clears Thr2."""
    pairs = highlight_sentences(case)
    if not pairs:
        return []
    vectors = embed_in_batches(client, [sentence.text for _, sentence in pairs])
    kept: list[Highlight] = []
    for (section, sentence), vec in zip(pairs, vectors):
        similarity = cosine(query_vec, vec)
        if similarity >= cfg.thr2_highlight:
            kept.append(Highlight(section, sentence, similarity))
    return kept


def rerank_cases(
    hits: list[RetrievalHit],
    highlights_by_case: dict[str, list[Highlight]],
    cfg: RetrievalConfig,
) -> list[HighlightedCase]:
    """Order by (highlight count desc, retrieval score desc, case id asc)."""
    rows = [
        (hit, tuple(highlights_by_case.get(hit.doc_id, [])))
        for hit in hits
    ]
    rows.sort(key=lambda row: (-len(row[1]), -row[0].score, row[0].doc_id))
    return [
        HighlightedCase(hit.doc_id, hit.score, highlights, rank)
        for rank, (hit, highlights) in enumerate(rows[: cfg.k3_cases])
    ]


class CaseSearcher:
    """Full retrieve-highlight-rerank pipeline bound to one corpus."""

    def __init__(self, bundle: CorpusBundle, client: EmbeddingClient, cfg: RetrievalConfig):
        self.cfg = cfg
        self._client = client
        self._cases = {case.id: case for case in bundle.cases}
        self._store = build_case_store(bundle, client)

    def search(self, query: str) -> list[HighlightedCase]:
        if not query.strip():
            raise EmptyQuery()
        if len(self._store) == 0:
            return []
        query_vec = self._client.embed_batch([query])[0]
        hits = retrieve_cases(query_vec, self._store, self.cfg)
        highlights = {
            hit.doc_id: highlight_case(query_vec, self._cases[hit.doc_id], self._client, self.cfg)
            for hit in hits
        }
        return rerank_cases(hits, highlights, self.cfg)

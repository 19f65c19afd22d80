"""Article retrieval: top-K1 search, default context, and prompt assembly.

Three interchangeable backends rank statute articles for the user query:
pure BM25, pure dense cosine, or hybrid (dense ranking with the BM25 score
breaking ties). The top-3 ids of the ranked list form the default prompt
context until the user picks a different selection.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import bm25
from .config import RetrievalConfig
from .corpus import Article, CorpusBundle
from .embedding import EmbeddingClient, VectorStore, cosine
from .errors import EmptyQuery
from .models import RetrievalHit, as_hits

PROMPT_SOURCES_HEADER = "[参考法条]"
PROMPT_QUERY_HEADER = "[咨询问题]"


@dataclass(frozen=True)
class ArticleSelection:
    """The K1 list shown to the user and the subset they kept."""

    shown: tuple[str, ...]
    selected: tuple[str, ...]


class ArticleRetriever:
    """Ranks corpus articles for a query under a fixed backend."""

    def __init__(
        self,
        bundle: CorpusBundle,
        client: EmbeddingClient,
        cfg: RetrievalConfig,
        params: bm25.Bm25Params | None = None,
    ):
        self.bundle = bundle
        self.cfg = cfg
        self._client = client
        docs = [(article.id, article.text) for article in bundle.articles]
        self._index = bm25.build_index(docs, params) if docs else None
        vectors = client.embed_batch([text for _, text in docs]) if docs else []
        self._store = VectorStore([(doc_id, vec) for (doc_id, _), vec in zip(docs, vectors)])

    def retrieve(self, query: str) -> list[RetrievalHit]:
        """Up to k1_articles hits under the configured backend."""
        if not query.strip():
            raise EmptyQuery()
        if not self.bundle.articles:
            return []
        k = self.cfg.k1_articles
        if self.cfg.article_backend == "bm25":
            return self._bm25_hits(query, k)
        if self.cfg.article_backend == "vector":
            return self._vector_hits(query, k)
        return self._hybrid_hits(query, k)

    def _bm25_hits(self, query: str, k: int) -> list[RetrievalHit]:
        assert self._index is not None
        return bm25.top_k(self._index, query, k)

    def _vector_hits(self, query: str, k: int) -> list[RetrievalHit]:
        query_vec = self._client.embed_batch([query])[0]
        return self._store.top_k(query_vec, min(k, len(self._store)))

    def _hybrid_hits(self, query: str, k: int) -> list[RetrievalHit]:
        """Dense ranking; equal cosines fall back to BM25 score, then id."""
        assert self._index is not None
        query_vec = self._client.embed_batch([query])[0]
        scored = []
        for doc_id, vec in self._store.entries:
            dense = cosine(query_vec, vec)
            lexical = bm25.score(self._index, query, doc_id)
            scored.append((doc_id, dense, lexical))
        scored.sort(key=lambda row: (-row[1], -row[2], row[0]))
        return as_hits([(doc_id, dense) for doc_id, dense, _ in scored[:k]])


def default_context(hits: list[RetrievalHit], cfg: RetrievalConfig) -> list[str]:
    """Prefix of the hit ids used as the first-turn prompt context."""
    return [hit.doc_id for hit in hits[: cfg.default_context_size]]


def build_prompt(query: str, articles: list[Article]) -> str:
    """Render the fixed consultation prompt; article order is preserved."""
    lines = [PROMPT_SOURCES_HEADER + "\n"]
    for article in articles:
        lines.append(f"{article.statute}第{article.number}条：{article.text}\n")
    lines.append(PROMPT_QUERY_HEADER + "\n")
    lines.append(query)
    return "".join(lines)


def statute_order(articles: list[Article]) -> list[Article]:
    """Stable citation order for regenerated prompts: statute, then number."""
    return sorted(articles, key=lambda a: (a.statute, a.number))

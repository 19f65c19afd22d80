"""Okapi BM25 scoring over an in-memory inverted index.

The idf variant is ln(1 + (N - df + 0.5) / (df + 0.5)), which is strictly
positive, so a score is 0 exactly when query and document share no term.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from collections import Counter

from .errors import DuplicateDocId, EmptyCorpus, UnknownDoc
from .models import RetrievalHit, as_hits
from .textseg import tokenize


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75


@dataclass(frozen=True)
class InvertedIndex:
    """Postings per term (sorted by doc id), document lengths, and stats."""

    postings: dict[str, list[tuple[str, int]]]
    doc_lengths: dict[str, int]
    avg_doc_length: float
    doc_count: int
    params: Bm25Params = field(default_factory=Bm25Params)


def build_index(docs: list[tuple[str, str]], params: Bm25Params | None = None) -> InvertedIndex:
    """Tokenize and index (doc_id, text) pairs.

    Raises EmptyCorpus when no document yields a token, DuplicateDocId on a
    repeated id.
    """
    params = params or Bm25Params()
    doc_lengths: dict[str, int] = {}
    term_freqs: dict[str, Counter] = {}
    for doc_id, text in docs:
        if doc_id in doc_lengths:
            raise DuplicateDocId(doc_id)
        tokens = tokenize(text)
        doc_lengths[doc_id] = len(tokens)
        for term, tf in Counter(tokens).items():
            term_freqs.setdefault(term, Counter())[doc_id] = tf
    total_tokens = sum(doc_lengths.values())
    if not doc_lengths or total_tokens == 0:
        raise EmptyCorpus("no document with at least one token")
    postings = {term: sorted(freqs.items()) for term, freqs in term_freqs.items()}
    return InvertedIndex(
        postings=postings,
        doc_lengths=doc_lengths,
        avg_doc_length=total_tokens / len(doc_lengths),
        doc_count=len(doc_lengths),
        params=params,
    )


def idf(index: InvertedIndex, term: str) -> float:
    df = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def _term_frequency(index: InvertedIndex, term: str, doc_id: str) -> int:
    plist = index.postings.get(term)
    if not plist:
        return 0
    pos = bisect_left(plist, doc_id, key=lambda entry: entry[0])
    if pos < len(plist) and plist[pos][0] == doc_id:
        return plist[pos][1]
    return 0


def score(index: InvertedIndex, query: str, doc_id: str) -> float:
    """BM25 score of `doc_id` for `query`; repeated query terms add up."""
    if doc_id not in index.doc_lengths:
        raise UnknownDoc(doc_id)
    k1, b = index.params.k1, index.params.b
    length_norm = k1 * (1.0 - b + b * index.doc_lengths[doc_id] / index.avg_doc_length)
    total = 0.0
    for term in tokenize(query):
        tf = _term_frequency(index, term, doc_id)
        if tf == 0:
            continue
        total += idf(index, term) * (tf * (k1 + 1.0)) / (tf + length_norm)
    return total


def top_k(index: InvertedIndex, query: str, k: int) -> list[RetrievalHit]:
    """Positive-scoring documents, best first; ties broken by doc id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates = {doc_id for term in set(tokenize(query)) for doc_id, _ in index.postings.get(term, ())}
    scored = [(doc_id, score(index, query, doc_id)) for doc_id in candidates]
    scored = [(d, s) for d, s in scored if s > 0.0]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return as_hits(scored[:k])

"""Independent reference implementations used to cross-check the engine.

Each oracle is written straight from the defining formula, with plain loops
and no shared code beyond the tokenizer (term identity is a fixed contract;
scoring is what these double-check). Tests compare engine output against
these at tight tolerances.
"""

from __future__ import annotations

import math
from collections import Counter

from ella.embedding import cosine, mock_embed
from ella.textseg import tokenize


def ndcg_oracle(ranking: list[str], rels: dict[str, int], k: int) -> float:
    """NDCG with exponential gain and log2(position + 1) discount."""

    def dcg(grades: list[int]) -> float:
        total = 0.0
        for i, grade in enumerate(grades[:k], start=1):
            total += (2**grade - 1) / math.log(i + 1, 2)
        return total

    realized = dcg([rels.get(doc_id, 0) for doc_id in ranking])
    ideal = dcg(sorted(rels.values(), reverse=True))
    if ideal == 0:
        return 0.0
    return realized / ideal


def bm25_oracle(
    docs: list[tuple[str, str]],
    query: str,
    doc_id: str,
    k1: float = 1.5,
    b: float = 0.75,
) -> float:
    """Okapi BM25 from the formula, no inverted index.

    idf = ln(1 + (N - df + 0.5) / (df + 0.5)); repeated query terms each
    contribute their own summand.
    """
    token_lists = {d: tokenize(text) for d, text in docs}
    n = len(token_lists)
    lengths = {d: len(tokens) for d, tokens in token_lists.items()}
    avgdl = sum(lengths.values()) / n
    tfs = {d: Counter(tokens) for d, tokens in token_lists.items()}
    total = 0.0
    for term in tokenize(query):
        tf = tfs[doc_id][term]
        if tf == 0:
            continue
        df = sum(1 for d in tfs if tfs[d][term] > 0)
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        norm = k1 * (1 - b + b * lengths[doc_id] / avgdl)
        total += idf * tf * (k1 + 1) / (tf + norm)
    return total


def bm25_top_k_oracle(
    docs: list[tuple[str, str]],
    query: str,
    k: int,
    k1: float = 1.5,
    b: float = 0.75,
) -> list[tuple[str, float]]:
    """Positive scores only, ordered by (score desc, doc id asc)."""
    scored = [(doc_id, bm25_oracle(docs, query, doc_id, k1, b)) for doc_id, _ in docs]
    scored = [(doc_id, value) for doc_id, value in scored if value > 0]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def pairwise_grounding_oracle(
    sentence_texts: list[str],
    sources: list[tuple[str, str, str]],
    threshold: float,
) -> list[set[tuple[str, str]]]:
    """Exhaustive (sentence, source) cosine scan with the mock embedder.

    `sources` rows are (kind, doc_id, text); the result holds, per sentence,
    the set of (kind, doc_id) whose similarity reaches the threshold.
    """
    kept: list[set[tuple[str, str]]] = []
    for sentence in sentence_texts:
        sentence_vec = mock_embed(sentence)
        hits = set()
        for kind, doc_id, text in sources:
            if cosine(sentence_vec, mock_embed(text)) >= threshold:
                hits.add((kind, doc_id))
        kept.append(hits)
    return kept


def cosine_top_k_oracle(
    query_text: str, docs: list[tuple[str, str]], k: int
) -> list[tuple[str, float]]:
    """Brute-force dense ranking with the mock embedder."""
    query_vec = mock_embed(query_text)
    scored = [(doc_id, cosine(query_vec, mock_embed(text))) for doc_id, text in docs]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]

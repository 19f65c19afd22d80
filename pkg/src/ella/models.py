"""Carrier types shared by the lexical and dense retrieval backends."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RetrievalHit:
    """One ranked result: document id, backend score, 0-based rank."""

    doc_id: str
    score: float
    rank: int


def as_hits(scored: list[tuple[str, float]]) -> list[RetrievalHit]:
    """Turn (doc_id, score) pairs, already ordered, into ranked hits."""
    return [RetrievalHit(doc_id=d, score=s, rank=i) for i, (d, s) in enumerate(scored)]

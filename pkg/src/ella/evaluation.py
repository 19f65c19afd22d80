"""NDCG@k evaluation over run and qrels files, with a plain-text report.

Gain is exponential (2^grade - 1) with a log2(position + 1) discount; the
ideal DCG ranks every graded document for the query, truncated at k. A query
with no positive grades scores 0 by convention, as does a qrels query the
run never answered.
"""

from __future__ import annotations

import math
from pathlib import Path

from .errors import MalformedRecord, StorageFailure, UnknownQuery

DEFAULT_KS = (10, 20, 30)

Qrels = dict[str, dict[str, int]]
RunFile = dict[str, list[str]]


def _dcg(grades: list[int], k: int) -> float:
    total = 0.0
    for position, grade in enumerate(grades[:k]):
        total += (2.0**grade - 1.0) / math.log2(position + 2)
    return total


def ndcg_at_k(ranking: list[str], rels: dict[str, int], k: int) -> float:
    """NDCG of one ranking; 0.0 when the query has no relevant documents."""
    if k < 1:
        raise ValueError("k must be >= 1")
    dcg = _dcg([rels.get(doc_id, 0) for doc_id in ranking], k)
    idcg = _dcg(sorted(rels.values(), reverse=True), k)
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


def evaluate_run(run: RunFile, qrels: Qrels, ks: tuple[int, ...] = DEFAULT_KS) -> dict[int, float]:
    """Mean NDCG@k over all qrels queries, as fractions in [0, 1].

    Queries the run never answered contribute 0; run queries absent from
    the qrels are an input error.
    """
    for query_id in run:
        if query_id not in qrels:
            raise UnknownQuery(query_id)
    results: dict[int, float] = {}
    query_ids = sorted(qrels)
    for k in ks:
        scores = [ndcg_at_k(run.get(query_id, []), qrels[query_id], k) for query_id in query_ids]
        results[k] = sum(scores) / len(scores) if scores else 0.0
    return results


def _open_table(path: Path):
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise StorageFailure(f"cannot read {path}: {exc}") from exc


def load_qrels(path: Path) -> Qrels:
    """Parse `query_id<TAB>doc_id<TAB>grade` lines."""
    qrels: Qrels = {}
    with _open_table(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3:
                raise MalformedRecord(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
            query_id, doc_id, raw_grade = fields
            try:
                grade = int(raw_grade)
            except ValueError as exc:
                raise MalformedRecord(line_no, f"grade {raw_grade!r} is not an integer") from exc
            if grade < 0:
                raise MalformedRecord(line_no, "grade must be >= 0")
            if doc_id in qrels.setdefault(query_id, {}):
                raise MalformedRecord(line_no, f"duplicate judgment for {query_id}/{doc_id}")
            qrels[query_id][doc_id] = grade
    return qrels


def load_run(path: Path) -> RunFile:
    """Parse `query_id<TAB>doc_id<TAB>rank<TAB>score` lines into rankings."""
    rows: dict[str, list[tuple[int, str]]] = {}
    with _open_table(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 4:
                raise MalformedRecord(line_no, f"expected 4 tab-separated fields, got {len(fields)}")
            query_id, doc_id, raw_rank, raw_score = fields
            try:
                rank = int(raw_rank)
                float(raw_score)
            except ValueError as exc:
                raise MalformedRecord(line_no, "rank or score is not numeric") from exc
            rows.setdefault(query_id, []).append((rank, doc_id))
    run: RunFile = {}
    for query_id, ranked in rows.items():
        ranked.sort()
        docs = [doc_id for _, doc_id in ranked]
        if len(set(docs)) != len(docs):
            raise MalformedRecord(0, f"duplicate document in ranking for query {query_id}")
        run[query_id] = docs
    return run


def format_report(
    rows: list[tuple[str, dict[int, float]]], ks: tuple[int, ...] = DEFAULT_KS
) -> str:
    """Aligned table, one row per model, NDCG values in percent."""
    headers = ["Model"] + [f"NDCG@{k}" for k in ks]
    cells = [[name] + [f"{results[k] * 100.0:.2f}" for k in ks] for name, results in rows]
    widths = [
        max(len(headers[col]), *(len(row[col]) for row in cells)) if cells else len(headers[col])
        for col in range(len(headers))
    ]
    lines = [
        " | ".join(header.ljust(width) for header, width in zip(headers, widths)),
        "-+-".join("-" * width for width in widths),
    ]
    for row in cells:
        lines.append(
            " | ".join(
                value.ljust(width) if col == 0 else value.rjust(width)
                for col, (value, width) in enumerate(zip(row, widths))
            )
        )
    return "\n".join(lines)

"""Mine contrastive (sentence, article) training pairs and split datasets.

Each mining input carries a query plus three (article, response) items. Per
item, response sentences are scored with BM25 against a one-document index
holding just that article: the best sentence becomes the positive pair, the
two worst (excluding the positive) become intra-response negatives, and the
positive sentence paired with each other item's article yields cross-article
negatives. Three items of three or more sentences therefore produce 15 pairs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from . import bm25
from .corpus import Article, CorpusBundle, get_document
from .errors import (
    DuplicateId,
    EmptyCorpus,
    MalformedRecord,
    NotFound,
    StorageFailure,
    TooFewItems,
)
from .textseg import split_sentences

LABEL_POSITIVE = "positive"
LABEL_NEGATIVE = "negative"

SOURCE_INTRA_BEST = "intra_best"
SOURCE_INTRA_WORST = "intra_worst"
SOURCE_CROSS_ARTICLE = "cross_article"

ITEMS_PER_INPUT = 3
INTRA_WORST_PER_ITEM = 2


@dataclass(frozen=True)
class MiningItem:
    article: Article
    response: str


@dataclass(frozen=True)
class MiningInput:
    query_id: str
    query: str
    items: tuple[MiningItem, ...]


@dataclass(frozen=True)
class TrainingPair:
    query_id: str
    sentence: str
    article_id: str
    label: str
    source: str


@dataclass(frozen=True)
class MiningReport:
    inputs: int
    pairs: int
    skipped: int


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    train_fraction: float = 0.8
    valid_fraction: float = 0.1
    test_fraction: float = 0.1


def sentence_scores(article: Article, sentences: list[str]) -> list[float]:
    """BM25 score of each sentence against the single-document article index.

    An article whose text yields no tokens has no index; every sentence
    then scores 0 (no overlap is possible).
    """
    try:
        index = bm25.build_index([(article.id, article.text)])
    except EmptyCorpus:
        return [0.0] * len(sentences)
    return [bm25.score(index, sentence, article.id) for sentence in sentences]


def mine_pairs(mining_input: MiningInput) -> list[TrainingPair]:
    """All training pairs for one input; deterministic, ties by sentence index."""
    if len(mining_input.items) != ITEMS_PER_INPUT:
        raise TooFewItems(
            f"expected {ITEMS_PER_INPUT} items, got {len(mining_input.items)}"
        )
    pairs: list[TrainingPair] = []
    for i, item in enumerate(mining_input.items):
        sentences = [s.text for s in split_sentences(item.response)]
        if not sentences:
            raise ValueError(f"response for article {item.article.id} has no sentences")
        scores = sentence_scores(item.article, sentences)
        best = min(range(len(sentences)), key=lambda idx: (-scores[idx], idx))
        pairs.append(
            TrainingPair(
                mining_input.query_id,
                sentences[best],
                item.article.id,
                LABEL_POSITIVE,
                SOURCE_INTRA_BEST,
            )
        )
        worst_order = sorted(
            (idx for idx in range(len(sentences)) if idx != best),
            key=lambda idx: (scores[idx], idx),
        )
        for idx in worst_order[:INTRA_WORST_PER_ITEM]:
            pairs.append(
                TrainingPair(
                    mining_input.query_id,
                    sentences[idx],
                    item.article.id,
                    LABEL_NEGATIVE,
                    SOURCE_INTRA_WORST,
                )
            )
        for t, other in enumerate(mining_input.items):
            if t != i:
                pairs.append(
                    TrainingPair(
                        mining_input.query_id,
                        sentences[best],
                        other.article.id,
                        LABEL_NEGATIVE,
                        SOURCE_CROSS_ARTICLE,
                    )
                )
    return pairs


def parse_mining_line(record: dict, bundle: CorpusBundle, line_no: int) -> MiningInput:
    """Resolve one input line against the article corpus."""
    try:
        query_id = record["query_id"]
        query = record["query"]
        raw_items = record["items"]
    except KeyError as exc:
        raise MalformedRecord(line_no, f"missing field {exc.args[0]!r}") from exc
    if not isinstance(query_id, str) or not isinstance(query, str):
        raise MalformedRecord(line_no, "query_id and query must be strings")
    if not isinstance(raw_items, list) or len(raw_items) != ITEMS_PER_INPUT:
        raise MalformedRecord(line_no, f"items must be a list of {ITEMS_PER_INPUT}")
    items: list[MiningItem] = []
    seen_articles: set[str] = set()
    for raw in raw_items:
        if not isinstance(raw, dict) or "article_id" not in raw or "response" not in raw:
            raise MalformedRecord(line_no, "item must have article_id and response")
        article_id = raw["article_id"]
        response = raw["response"]
        if not isinstance(article_id, str) or not isinstance(response, str):
            raise MalformedRecord(line_no, "article_id and response must be strings")
        if not response.strip():
            raise MalformedRecord(line_no, f"empty response for article {article_id}")
        if article_id in seen_articles:
            raise MalformedRecord(line_no, f"duplicate article id {article_id}")
        seen_articles.add(article_id)
        try:
            article = get_document(bundle, "article", article_id)
        except NotFound as exc:
            raise MalformedRecord(line_no, f"unknown article id {article_id}") from exc
        items.append(MiningItem(article, response))
    return MiningInput(query_id, query, tuple(items))


def run_mining(queries_path: Path, output_path: Path, bundle: CorpusBundle) -> MiningReport:
    """Batch-mine a query file; malformed lines are skipped and counted."""
    inputs = 0
    total_pairs = 0
    skipped = 0
    try:
        reader = open(queries_path, encoding="utf-8")
    except OSError as exc:
        raise StorageFailure(f"cannot read {queries_path}: {exc}") from exc
    try:
        writer = open(output_path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        reader.close()
        raise StorageFailure(f"cannot write {output_path}: {exc}") from exc
    with reader, writer:
        for line_no, line in enumerate(reader, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise MalformedRecord(line_no, "record is not a JSON object")
                mining_input = parse_mining_line(record, bundle, line_no)
                pairs = mine_pairs(mining_input)
            except (MalformedRecord, TooFewItems, ValueError):
                skipped += 1
                continue
            inputs += 1
            total_pairs += len(pairs)
            for pair in pairs:
                writer.write(
                    json.dumps(
                        {
                            "query_id": pair.query_id,
                            "sentence": pair.sentence,
                            "article_id": pair.article_id,
                            "label": pair.label,
                            "source": pair.source,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
    return MiningReport(inputs, total_pairs, skipped)


def split_dataset(ids: list[str], spec: SplitSpec) -> dict[str, list[str]]:
    """Deterministic 80/10/10 partition: sort, seeded Fisher-Yates, slice."""
    if len(set(ids)) != len(ids):
        seen: set[str] = set()
        for doc_id in ids:
            if doc_id in seen:
                raise DuplicateId(doc_id)
            seen.add(doc_id)
    shuffled = sorted(ids)
    rng = random.Random(spec.seed)
    for i in range(len(shuffled) - 1, 0, -1):
        j = rng.randrange(i + 1)
        shuffled[i], shuffled[j] = shuffled[j], shuffled[i]
    n = len(shuffled)
    n_train = int(spec.train_fraction * n)
    n_valid = int(spec.valid_fraction * n)
    return {
        "train": shuffled[:n_train],
        "valid": shuffled[n_train : n_train + n_valid],
        "test": shuffled[n_train + n_valid :],
    }

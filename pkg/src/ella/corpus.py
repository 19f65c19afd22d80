"""Load and validate the three source corpora from JSONL files.

One JSON object per line, UTF-8. Documents keep file order; a loaded
bundle is immutable and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateId, EmptyText, MalformedRecord, NotFound, StorageFailure

KIND_ARTICLE = "article"
KIND_INTERPRETATION = "interpretation"
KIND_CASE = "case"


@dataclass(frozen=True)
class Article:
    id: str
    statute: str
    number: int
    text: str


@dataclass(frozen=True)
class CaseSection:
    name: str
    text: str


@dataclass(frozen=True)
class JudicialInterpretation:
    id: str
    text: str


@dataclass(frozen=True)
class LegalCase:
    id: str
    title: str
    sections: tuple[CaseSection, ...]
    source_url: str | None = None


@dataclass(frozen=True)
class CorpusBundle:
    articles: tuple[Article, ...]
    interpretations: tuple[JudicialInterpretation, ...]
    cases: tuple[LegalCase, ...]
    _by_id: dict[str, dict] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        index = {
            KIND_ARTICLE: {doc.id: doc for doc in self.articles},
            KIND_INTERPRETATION: {doc.id: doc for doc in self.interpretations},
            KIND_CASE: {doc.id: doc for doc in self.cases},
        }
        object.__setattr__(self, "_by_id", index)

    def get(self, kind: str, doc_id: str):
        return get_document(self, kind, doc_id)


def _iter_records(path: Path):
    """Yield (line_no, parsed object) for every non-blank line."""
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise StorageFailure(f"cannot read {path}: {exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise MalformedRecord(line_no, "record is not a JSON object")
            yield line_no, record


def _require(record: dict, key: str, expected: type, line_no: int):
    value = record.get(key)
    # bool is an int subclass; reject it explicitly for numeric fields
    if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
        raise MalformedRecord(line_no, f"field {key!r} missing or not {expected.__name__}")
    return value


def _checked_text(doc_id: str, text: str) -> str:
    if not text.strip():
        raise EmptyText(doc_id)
    return text


def load_articles(path: Path) -> tuple[Article, ...]:
    articles: list[Article] = []
    seen_ids: set[str] = set()
    seen_positions: set[tuple[str, int]] = set()
    for line_no, record in _iter_records(path):
        doc_id = _require(record, "id", str, line_no)
        statute = _require(record, "statute", str, line_no)
        number = _require(record, "number", int, line_no)
        text = _require(record, "text", str, line_no)
        if number < 1:
            raise MalformedRecord(line_no, "field 'number' must be a positive integer")
        if doc_id in seen_ids:
            raise DuplicateId(doc_id)
        if (statute, number) in seen_positions:
            raise MalformedRecord(line_no, f"duplicate position {statute} #{number}")
        seen_ids.add(doc_id)
        seen_positions.add((statute, number))
        articles.append(Article(doc_id, statute, number, _checked_text(doc_id, text)))
    return tuple(articles)


def load_interpretations(path: Path) -> tuple[JudicialInterpretation, ...]:
    interpretations: list[JudicialInterpretation] = []
    seen_ids: set[str] = set()
    for line_no, record in _iter_records(path):
        doc_id = _require(record, "id", str, line_no)
        text = _require(record, "text", str, line_no)
        if doc_id in seen_ids:
            raise DuplicateId(doc_id)
        seen_ids.add(doc_id)
        interpretations.append(JudicialInterpretation(doc_id, _checked_text(doc_id, text)))
    return tuple(interpretations)


def load_cases(path: Path) -> tuple[LegalCase, ...]:
    cases: list[LegalCase] = []
    seen_ids: set[str] = set()
    for line_no, record in _iter_records(path):
        doc_id = _require(record, "id", str, line_no)
        title = _require(record, "title", str, line_no)
        raw_sections = _require(record, "sections", list, line_no)
        source_url = record.get("source_url")
        if source_url is not None and not isinstance(source_url, str):
            raise MalformedRecord(line_no, "field 'source_url' must be a string")
        if not raw_sections:
            raise MalformedRecord(line_no, "case must have at least one section")
        sections: list[CaseSection] = []
        names: set[str] = set()
        for raw in raw_sections:
            if not isinstance(raw, dict):
                raise MalformedRecord(line_no, "section is not a JSON object")
            name = _require(raw, "name", str, line_no)
            text = _require(raw, "text", str, line_no)
            if name in names:
                raise MalformedRecord(line_no, f"duplicate section name {name!r}")
            names.add(name)
            sections.append(CaseSection(name, text))
        if doc_id in seen_ids:
            raise DuplicateId(doc_id)
        seen_ids.add(doc_id)
        cases.append(LegalCase(doc_id, title, tuple(sections), source_url))
    return tuple(cases)


def load_corpus(articles_path: Path, interpretations_path: Path, cases_path: Path) -> CorpusBundle:
    """Load all three corpora; document order equals file order."""
    return CorpusBundle(
        articles=load_articles(articles_path),
        interpretations=load_interpretations(interpretations_path),
        cases=load_cases(cases_path),
    )


def get_document(bundle: CorpusBundle, kind: str, doc_id: str):
    """Look up one document by kind and id."""
    if kind not in bundle._by_id:
        raise NotFound(kind, doc_id)
    document = bundle._by_id[kind].get(doc_id)
    if document is None:
        raise NotFound(kind, doc_id)
    return document


def dump_articles(articles: tuple[Article, ...] | list[Article], path: Path) -> None:
    _dump_lines(
        path,
        (
            {"id": a.id, "statute": a.statute, "number": a.number, "text": a.text}
            for a in articles
        ),
    )


def dump_interpretations(
    interpretations: tuple[JudicialInterpretation, ...] | list[JudicialInterpretation],
    path: Path,
) -> None:
    _dump_lines(path, ({"id": i.id, "text": i.text} for i in interpretations))


def dump_cases(cases: tuple[LegalCase, ...] | list[LegalCase], path: Path) -> None:
    def as_record(case: LegalCase) -> dict:
        record: dict = {
            "id": case.id,
            "title": case.title,
            "sections": [{"name": s.name, "text": s.text} for s in case.sections],
        }
        if case.source_url is not None:
            record["source_url"] = case.source_url
        return record

    _dump_lines(path, (as_record(c) for c in cases))


def _dump_lines(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")

"""Exception types shared across the engine."""


class EllaError(Exception):
    """Base class for every error raised by this package."""


class MalformedRecord(EllaError):
    """A line in an input file could not be parsed or validated."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateId(EllaError):
    """Two documents share an identifier that must be unique."""

    def __init__(self, doc_id: str):
        super().__init__(f"duplicate id: {doc_id}")
        self.doc_id = doc_id


class EmptyText(EllaError):
    """A document body is empty after whitespace trimming."""

    def __init__(self, doc_id: str):
        super().__init__(f"empty text for document: {doc_id}")
        self.doc_id = doc_id


class NotFound(EllaError):
    """Lookup of a document or conversation resource failed."""

    def __init__(self, kind: str, identifier: str):
        super().__init__(f"{kind} not found: {identifier}")
        self.kind = kind
        self.identifier = identifier


class EmptyCorpus(EllaError):
    """Index construction was attempted over zero usable documents."""


class DuplicateDocId(EllaError):
    """Index construction saw the same document id twice."""

    def __init__(self, doc_id: str):
        super().__init__(f"duplicate doc id: {doc_id}")
        self.doc_id = doc_id


class UnknownDoc(EllaError):
    """A score was requested for a document that is not in the index."""

    def __init__(self, doc_id: str):
        super().__init__(f"unknown doc: {doc_id}")
        self.doc_id = doc_id


class DimensionMismatch(EllaError):
    """Two vectors (or a vector and a store) disagree on dimensionality."""


class ProviderFailure(EllaError):
    """Base class for failures of an external model provider."""


class ProviderUnreachable(ProviderFailure):
    """The provider endpoint could not be reached."""


class ProviderTimeout(ProviderFailure):
    """The provider did not answer within the configured timeout."""


class ProviderError(ProviderFailure):
    """The provider answered with an error status or a malformed body."""

    def __init__(self, status: int, body: str):
        super().__init__(f"provider error {status}: {body[:200]}")
        self.status = status
        self.body = body


class EmptyQuery(EllaError):
    """A retrieval query was empty after whitespace trimming."""


class TooFewItems(EllaError):
    """A mining input did not carry exactly three (article, response) items."""


class UnknownQuery(EllaError):
    """A run file contains a query id absent from the qrels."""

    def __init__(self, query_id: str):
        super().__init__(f"query not in qrels: {query_id}")
        self.query_id = query_id


class InvalidSelection(EllaError):
    """A regeneration selected article ids outside the turn's shown list."""

    def __init__(self, bad_ids: list):
        super().__init__(f"selected ids not among shown articles: {sorted(bad_ids)}")
        self.bad_ids = list(bad_ids)


class Busy(EllaError):
    """A generation is already in flight for this conversation."""


class StorageFailure(EllaError):
    """An on-disk file (corpus, run, event log) could not be read or written."""


class ConfigError(EllaError):
    """The configuration file is missing, unreadable, or inconsistent."""

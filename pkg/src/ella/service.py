"""The consultation service: engine, HTTP API, and wire payloads.

ConsultEngine owns the full pipeline for a message turn: retrieve articles,
build the prompt, generate, ground the response, and search cases. Every
completed turn is appended to the conversation's event log as the exact
payload served to clients, so a restarted service replays to byte-identical
API responses.
"""

from __future__ import annotations

import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .article_retrieval import ArticleRetriever, build_prompt, default_context, statute_order
from .bm25 import Bm25Params
from .case_retrieval import CaseSearcher, HighlightedCase
from .config import AppConfig
from .corpus import CorpusBundle, load_corpus
from .embedding import (
    ROLE_CASE_RETRIEVER,
    ROLE_GROUNDER,
    EmbeddingClient,
    EmbeddingProviderRef,
)
from .errors import (
    Busy,
    EmptyQuery,
    InvalidSelection,
    NotFound,
    ProviderFailure,
)
from .events import (
    EVENT_CONVERSATION_CREATED,
    EVENT_TURN_COMPLETED,
    EVENT_TURN_REGENERATED,
    EVENT_TURN_REQUESTED,
    ConversationState,
    EventLog,
)
from .grounding import GroundedSentence, Grounder, as_sentence_payload
from .llm_gateway import ROLE_ASSISTANT, ROLE_USER, ChatMessage, LlmClient, LlmProviderRef


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


class ConsultEngine:
    """Conversation lifecycle and the per-turn consultation pipeline."""

    def __init__(
        self,
        config: AppConfig,
        bundle: CorpusBundle | None = None,
        llm_client: LlmClient | None = None,
        grounder_client: EmbeddingClient | None = None,
        case_client: EmbeddingClient | None = None,
    ):
        self.config = config
        self.bundle = bundle if bundle is not None else load_corpus(
            config.articles_path, config.interpretations_path, config.cases_path
        )
        self.llm = llm_client if llm_client is not None else LlmClient(
            LlmProviderRef(
                endpoint=config.llm_endpoint,
                timeout=config.llm_timeout,
                max_context_articles=config.max_context_articles,
            )
        )
        self._grounder_client = grounder_client if grounder_client is not None else (
            EmbeddingClient(
                EmbeddingProviderRef(
                    ROLE_GROUNDER, config.grounder_endpoint, config.embedding_dimension
                )
            )
        )
        self._case_client = case_client if case_client is not None else EmbeddingClient(
            EmbeddingProviderRef(
                ROLE_CASE_RETRIEVER, config.case_retriever_endpoint, config.embedding_dimension
            )
        )
        self.retriever = ArticleRetriever(
            self.bundle,
            self._grounder_client,
            config.retrieval,
            Bm25Params(config.bm25_k1, config.bm25_b),
        )
        self.grounder = Grounder(self.bundle, self._grounder_client, config.retrieval)
        self.case_searcher = CaseSearcher(self.bundle, self._case_client, config.retrieval)
        self.log = EventLog(config.data_dir)
        self._conversations: dict[str, ConversationState] = self.log.replay_all()
        self._locks: dict[str, threading.Lock] = {
            conversation_id: threading.Lock() for conversation_id in self._conversations
        }
        self._registry_lock = threading.Lock()

    # -- conversation lifecycle --------------------------------------------

    def create_conversation(self) -> dict:
        conversation_id = uuid.uuid4().hex
        created_at = _utc_now()
        self.log.append(
            conversation_id,
            {
                "type": EVENT_CONVERSATION_CREATED,
                "conversation_id": conversation_id,
                "created_at": created_at,
            },
        )
        with self._registry_lock:
            self._conversations[conversation_id] = ConversationState(
                conversation_id, created_at
            )
            self._locks[conversation_id] = threading.Lock()
        return {"conversation_id": conversation_id}

    def list_conversations(self) -> list[dict]:
        with self._registry_lock:
            states = list(self._conversations.values())
        states.sort(key=lambda s: (s.created_at, s.conversation_id), reverse=True)
        return [
            {
                "conversation_id": state.conversation_id,
                "title": state.title,
                "created_at": state.created_at,
            }
            for state in states
        ]

    def get_conversation(self, conversation_id: str) -> dict:
        state = self._state(conversation_id)
        return {
            "conversation_id": state.conversation_id,
            "title": state.title,
            "created_at": state.created_at,
            "turns": state.turns,
        }

    # -- turn pipeline -------------------------------------------------------

    def post_message(self, conversation_id: str, query: str) -> dict:
        state = self._state(conversation_id)
        if not query.strip():
            raise EmptyQuery()
        lock = self._lock(conversation_id)
        if not lock.acquire(blocking=False):
            raise Busy(f"generation already in flight for {conversation_id}")
        try:
            turn_id = len(state.turns)
            self.log.append(
                conversation_id,
                {
                    "type": EVENT_TURN_REQUESTED,
                    "turn_id": turn_id,
                    "query": query,
                    "requested_at": _utc_now(),
                },
            )
            turn = self._run_turn(state, turn_id, query)
            event = {"type": EVENT_TURN_COMPLETED, "turn": turn}
            self.log.append(conversation_id, event)
            state.apply(event)
            return turn
        finally:
            lock.release()

    def regenerate(self, conversation_id: str, turn_id: int, selected_ids: list[str]) -> dict:
        state = self._state(conversation_id)
        turn = self._find_turn(state, turn_id)
        shown = set(turn["shown_articles"]["shown"])
        bad = [doc_id for doc_id in selected_ids if doc_id not in shown]
        if bad:
            raise InvalidSelection(bad)
        lock = self._lock(conversation_id)
        if not lock.acquire(blocking=False):
            raise Busy(f"generation already in flight for {conversation_id}")
        try:
            articles = statute_order(
                [self.bundle.get("article", doc_id) for doc_id in selected_ids]
            )
            articles = articles[: self.llm.ref.max_context_articles]
            prompt = build_prompt(turn["query"], articles)
            history = self._history(state, before_turn=turn_id)
            response = self.llm.chat(history, prompt)
            grounding = self.grounder.ground(response)
            new_turn = dict(turn)
            new_turn["shown_articles"] = {
                "shown": turn["shown_articles"]["shown"],
                "selected": list(selected_ids),
            }
            new_turn["used_articles"] = [article.id for article in articles]
            new_turn["response"] = response
            new_turn["grounding"] = self._grounding_payload(grounding)
            new_turn["created_at"] = _utc_now()
            new_turn["revision"] = turn["revision"] + 1
            event = {"type": EVENT_TURN_REGENERATED, "turn": new_turn}
            self.log.append(conversation_id, event)
            state.apply(event)
            return new_turn
        finally:
            lock.release()

    def health(self) -> dict:
        return {
            "status": "ok",
            "providers": {
                "llm": self.llm.ref.endpoint,
                "grounder": self._grounder_client.ref.endpoint,
                "case_retriever": self._case_client.ref.endpoint,
            },
        }

    def close(self) -> None:
        self.llm.close()
        self._grounder_client.close()
        self._case_client.close()

    # -- internals -----------------------------------------------------------

    def _state(self, conversation_id: str) -> ConversationState:
        with self._registry_lock:
            state = self._conversations.get(conversation_id)
        if state is None:
            raise NotFound("conversation", conversation_id)
        return state

    def _lock(self, conversation_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks[conversation_id]

    def _find_turn(self, state: ConversationState, turn_id: int) -> dict:
        for turn in state.turns:
            if turn["turn_id"] == turn_id:
                return turn
        raise NotFound("turn", str(turn_id))

    def _history(self, state: ConversationState, before_turn: int | None = None) -> list[ChatMessage]:
        history: list[ChatMessage] = []
        for turn in state.turns:
            if before_turn is not None and turn["turn_id"] >= before_turn:
                break
            history.append(ChatMessage(ROLE_USER, turn["query"]))
            history.append(ChatMessage(ROLE_ASSISTANT, turn["response"]))
        return history

    def _run_turn(self, state: ConversationState, turn_id: int, query: str) -> dict:
        hits = self.retriever.retrieve(query)
        shown_ids = [hit.doc_id for hit in hits]
        used_ids = default_context(hits, self.config.retrieval)
        articles = [self.bundle.get("article", doc_id) for doc_id in used_ids]
        articles = articles[: self.llm.ref.max_context_articles]
        prompt = build_prompt(query, articles)
        history = self._history(state)
        response = self.llm.chat(history, prompt)
        grounding = self.grounder.ground(response)
        cases = self.case_searcher.search(query)
        return {
            "turn_id": turn_id,
            "query": query,
            "shown_articles": {"shown": shown_ids, "selected": []},
            "used_articles": [article.id for article in articles],
            "articles": [
                {
                    "id": hit.doc_id,
                    "statute": self.bundle.get("article", hit.doc_id).statute,
                    "number": self.bundle.get("article", hit.doc_id).number,
                    "text": self.bundle.get("article", hit.doc_id).text,
                    "score": hit.score,
                    "rank": hit.rank,
                }
                for hit in hits
            ],
            "response": response,
            "grounding": self._grounding_payload(grounding),
            "cases": [self._case_payload(case) for case in cases],
            "created_at": _utc_now(),
            "revision": 0,
        }

    def _grounding_payload(self, grounding: list[GroundedSentence]) -> list[dict]:
        payload = []
        for grounded in grounding:
            entry = as_sentence_payload(grounded)
            for basis in entry["bases"]:
                basis["text"] = self.bundle.get(basis["kind"], basis["doc_id"]).text
            payload.append(entry)
        return payload

    def _case_payload(self, case: HighlightedCase) -> dict:
        document = self.bundle.get("case", case.case_id)
        return {
            "case_id": case.case_id,
            "title": document.title,
            "retrieval_score": case.retrieval_score,
            "final_rank": case.final_rank,
            "highlight_count": case.highlight_count,
            "highlights": [
                {
                    "section": h.section,
                    "sentence": {
                        "index": h.sentence.index,
                        "text": h.sentence.text,
                        "char_span": list(h.sentence.char_span),
                    },
                    "similarity": h.similarity,
                }
                for h in case.highlights
            ],
            "sections": [{"name": s.name, "text": s.text} for s in document.sections],
            "source_url": document.source_url,
        }


class MessageBody(BaseModel):
    query: str


class RegenerateBody(BaseModel):
    selected_article_ids: list[str]


def create_app(engine: ConsultEngine, static_dir: Path | None = None) -> FastAPI:
    """HTTP front of the engine; errors map to the documented status codes."""
    app = FastAPI(title="ella", docs_url=None, redoc_url=None)

    def _error(status: int, error: str, detail: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": error, "detail": detail})

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(Busy)
    async def _busy(request: Request, exc: Busy):
        return _error(409, "busy", str(exc))

    @app.exception_handler(InvalidSelection)
    async def _invalid_selection(request: Request, exc: InvalidSelection):
        return _error(422, "invalid_selection", str(exc))

    @app.exception_handler(EmptyQuery)
    async def _empty_query(request: Request, exc: EmptyQuery):
        return _error(422, "empty_query", str(exc))

    @app.exception_handler(ProviderFailure)
    async def _provider_failure(request: Request, exc: ProviderFailure):
        return _error(502, "provider_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", str(exc))

    @app.post("/api/conversations")
    def post_conversations():
        return engine.create_conversation()

    @app.get("/api/conversations")
    def get_conversations():
        return engine.list_conversations()

    @app.get("/api/conversations/{conversation_id}")
    def get_conversation(conversation_id: str):
        return engine.get_conversation(conversation_id)

    @app.post("/api/conversations/{conversation_id}/messages")
    def post_message(conversation_id: str, body: MessageBody):
        return engine.post_message(conversation_id, body.query)

    @app.post("/api/conversations/{conversation_id}/turns/{turn_id}/regenerate")
    def post_regenerate(conversation_id: str, turn_id: int, body: RegenerateBody):
        return engine.regenerate(conversation_id, turn_id, body.selected_article_ids)

    @app.get("/api/health")
    def get_health():
        return engine.health()

    if static_dir is not None and static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")

    return app

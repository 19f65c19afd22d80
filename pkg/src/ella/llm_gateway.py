"""Chat-LLM provider client plus a deterministic offline mock.

The wire protocol is POST {endpoint}/chat with {"messages": [...]} answering
{"content": str}. The mock provider echoes every statute line found in the
prompt's context block prefixed with 根据, then closes with a fixed request
for more detail; that closure is what end-to-end tests key on.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import httpx

from .article_retrieval import PROMPT_QUERY_HEADER, PROMPT_SOURCES_HEADER
from .errors import ProviderError, ProviderTimeout, ProviderUnreachable

MOCK_ENDPOINT = "mock"
MOCK_CLOSING_LINE = "请补充更多信息。"

ROLE_USER = "user"
ROLE_ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


@dataclass(frozen=True)
class LlmProviderRef:
    endpoint: str = MOCK_ENDPOINT
    timeout: float = 60.0
    max_context_articles: int = 16

    @property
    def is_mock(self) -> bool:
        return self.endpoint == MOCK_ENDPOINT


def mock_chat(prompt: str) -> str:
    """Echo each context article line as a 根据 sentence, then ask for more.

    Only the lines between the context header and the query header count;
    an empty context block produces the closing line alone.
    """
    lines = prompt.split("\n")
    echoed: list[str] = []
    inside = False
    for line in lines:
        if line == PROMPT_SOURCES_HEADER:
            inside = True
            continue
        if line == PROMPT_QUERY_HEADER:
            break
        if inside and line.strip():
            echoed.append(f"根据{line}")
    return "\n".join(echoed + [MOCK_CLOSING_LINE])


class LlmClient:
    """Caller side of the chat protocol; one HTTP client per instance."""

    def __init__(
        self,
        ref: LlmProviderRef,
        transport: httpx.BaseTransport | None = None,
        max_in_flight: int = 4,
    ):
        self.ref = ref
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._client: httpx.Client | None = None
        if not ref.is_mock:
            self._client = httpx.Client(transport=transport, timeout=ref.timeout)

    def chat(self, history: list[ChatMessage], prompt: str) -> str:
        """Send history plus the prompt as the final user message."""
        if self.ref.is_mock:
            return mock_chat(prompt)
        assert self._client is not None
        messages = [{"role": m.role, "content": m.content} for m in history]
        messages.append({"role": ROLE_USER, "content": prompt})
        url = self.ref.endpoint.rstrip("/") + "/chat"
        try:
            with self._semaphore:
                response = self._client.post(url, json={"messages": messages})
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"LLM provider timed out: {exc}") from exc
        except httpx.TransportError as exc:
            raise ProviderUnreachable(f"LLM provider unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text)
        try:
            content = response.json()["content"]
        except (KeyError, ValueError) as exc:
            raise ProviderError(response.status_code, f"bad response body: {exc}") from exc
        if not isinstance(content, str):
            raise ProviderError(response.status_code, "response content is not a string")
        return content

    def close(self) -> None:
        if self._client is not None:
            self._client.close()


def chat(ref: LlmProviderRef, history: list[ChatMessage], prompt: str) -> str:
    """One-shot convenience wrapper around LlmClient."""
    client = LlmClient(ref)
    try:
        return client.chat(history, prompt)
    finally:
        client.close()

"""Test doubles for the LLM client used by service-level tests."""

from __future__ import annotations

import threading

from ella.llm_gateway import ChatMessage, LlmClient, LlmProviderRef


class CapturingLlm(LlmClient):
    """Mock-backed client that records every prompt it is asked to answer."""

    def __init__(self):
        super().__init__(LlmProviderRef())
        self.prompts: list[str] = []
        self.histories: list[list[ChatMessage]] = []

    def chat(self, history: list[ChatMessage], prompt: str) -> str:
        self.prompts.append(prompt)
        self.histories.append(list(history))
        return super().chat(history, prompt)


class BlockingLlm(LlmClient):
    """Client that parks inside chat() until released, to provoke Busy."""

    def __init__(self):
        super().__init__(LlmProviderRef())
        self.entered = threading.Event()
        self.release = threading.Event()

    def chat(self, history: list[ChatMessage], prompt: str) -> str:
        self.entered.set()
        assert self.release.wait(timeout=10.0), "BlockingLlm never released"
        return super().chat(history, prompt)

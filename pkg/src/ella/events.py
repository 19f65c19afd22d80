"""Append-only conversation persistence: one JSONL event file per conversation.

Events are the source of truth. `turn_completed` and `turn_regenerated`
carry the full turn payload exactly as served, so replaying a log after a
restart reproduces byte-identical API responses. `turn_requested` is an
audit record only; replay ignores it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedRecord, StorageFailure

EVENT_CONVERSATION_CREATED = "conversation_created"
EVENT_TURN_REQUESTED = "turn_requested"
EVENT_TURN_COMPLETED = "turn_completed"
EVENT_TURN_REGENERATED = "turn_regenerated"

TITLE_MAX_CHARS = 30


@dataclass
class ConversationState:
    """Materialized view of one conversation's event log."""

    conversation_id: str
    created_at: str
    turns: list[dict] = field(default_factory=list)

    @property
    def title(self) -> str:
        if not self.turns:
            return ""
        return self.turns[0]["query"][:TITLE_MAX_CHARS]

    def apply(self, event: dict) -> None:
        kind = event.get("type")
        if kind == EVENT_TURN_COMPLETED:
            self.turns.append(event["turn"])
        elif kind == EVENT_TURN_REGENERATED:
            turn = event["turn"]
            for i, existing in enumerate(self.turns):
                if existing["turn_id"] == turn["turn_id"]:
                    self.turns[i] = turn
                    return
            raise MalformedRecord(0, f"regeneration of unknown turn {turn.get('turn_id')}")
        elif kind in (EVENT_CONVERSATION_CREATED, EVENT_TURN_REQUESTED):
            return
        else:
            raise MalformedRecord(0, f"unknown event type {kind!r}")


class EventLog:
    """Writes and replays per-conversation event files under data_dir."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        try:
            data_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create data dir {data_dir}: {exc}") from exc

    def path_for(self, conversation_id: str) -> Path:
        return self.data_dir / f"{conversation_id}.jsonl"

    def append(self, conversation_id: str, event: dict) -> None:
        try:
            with open(self.path_for(conversation_id), "a", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(event, ensure_ascii=False) + "\n")
                f.flush()
        except OSError as exc:
            raise StorageFailure(f"cannot append event: {exc}") from exc

    def replay_one(self, path: Path) -> ConversationState:
        state: ConversationState | None = None
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_no, f"invalid event JSON: {exc.msg}") from exc
                if state is None:
                    if event.get("type") != EVENT_CONVERSATION_CREATED:
                        raise MalformedRecord(line_no, "log must start with conversation_created")
                    state = ConversationState(
                        conversation_id=event["conversation_id"],
                        created_at=event["created_at"],
                    )
                else:
                    state.apply(event)
        if state is None:
            raise MalformedRecord(0, f"empty event log {path.name}")
        return state

    def replay_all(self) -> dict[str, ConversationState]:
        """Rebuild every conversation present on disk."""
        states: dict[str, ConversationState] = {}
        for path in sorted(self.data_dir.glob("*.jsonl")):
            state = self.replay_one(path)
            states[state.conversation_id] = state
        return states

/**
 * UI state and its pure transitions.
 *
 * Nothing in this module touches the DOM or the network, so the rules that
 * matter (selection stays inside the turn's shown list, the active case index
 * stays in range, the highlight cursor cycles) are testable on their own.
 */

import type { Conversation, ConversationSummary, Turn } from "./api.js";

export type Pending = "none" | "sending" | "regenerating";

export interface UiState {
  conversations: ConversationSummary[];
  active: Conversation | null;
  /** turn_id -> checked article ids. Always a subset of that turn's shown list. */
  selection: Map<number, Set<string>>;
  activeCaseIndex: number;
  /** Cursor for the jump-to-next-highlight control; -1 before the first jump. */
  activeHighlight: number;
  pending: Pending;
  error: string | null;
}

export function initialState(): UiState {
  return {
    conversations: [],
    active: null,
    selection: new Map(),
    activeCaseIndex: 0,
    activeHighlight: -1,
    pending: "none",
    error: null,
  };
}

/**
 * Checkbox state for a turn the user has not touched yet: the articles the
 * model actually used. For an original turn that is the default context; for
 * a regenerated one it is whatever was selected last.
 */
export function defaultSelection(turn: Turn): Set<string> {
  const ids = turn.revision === 0 ? turn.used_articles : turn.shown_articles.selected;
  const shown = new Set(turn.shown_articles.shown);
  return new Set(ids.filter((id) => shown.has(id)));
}

/** Replace the active conversation and rebuild per-turn checkbox state. */
export function openConversation(state: UiState, conversation: Conversation): void {
  state.active = conversation;
  state.selection = new Map(
    conversation.turns.map((turn) => [turn.turn_id, defaultSelection(turn)]),
  );
  state.activeCaseIndex = 0;
  state.activeHighlight = -1;
  state.error = null;
}

/** Insert a new turn or replace the one with the same id (regeneration). */
export function adoptTurn(state: UiState, turn: Turn): void {
  if (!state.active) return;
  const turns = state.active.turns;
  const at = turns.findIndex((t) => t.turn_id === turn.turn_id);
  if (at >= 0) {
    turns[at] = turn;
  } else {
    turns.push(turn);
    state.activeCaseIndex = 0;
  }
  state.selection.set(turn.turn_id, defaultSelection(turn));
  state.activeHighlight = -1;
}

/** Toggle one checkbox; ids outside the turn's shown list are ignored. */
export function toggleArticle(state: UiState, turn: Turn, articleId: string): void {
  if (!turn.shown_articles.shown.includes(articleId)) return;
  const checked = state.selection.get(turn.turn_id) ?? defaultSelection(turn);
  if (checked.has(articleId)) {
    checked.delete(articleId);
  } else {
    checked.add(articleId);
  }
  state.selection.set(turn.turn_id, checked);
}

/** Checked ids in shown order, ready to be sent as selected_article_ids. */
export function selectedIds(state: UiState, turn: Turn): string[] {
  const checked = state.selection.get(turn.turn_id) ?? defaultSelection(turn);
  return turn.shown_articles.shown.filter((id) => checked.has(id));
}

/** Switch case tabs; the index is clamped into [0, |cases|). */
export function selectCase(state: UiState, turn: Turn, index: number): void {
  const count = turn.cases.length;
  state.activeCaseIndex = count === 0 ? 0 : Math.min(Math.max(index, 0), count - 1);
  state.activeHighlight = -1;
}

/** Advance the highlight cursor, wrapping around; -1 when there is nothing. */
export function nextHighlight(current: number, total: number): number {
  if (total <= 0) return -1;
  return (current + 1) % total;
}

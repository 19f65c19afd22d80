/**
 * DOM rendering for the four-part consultation screen: conversation sidebar
 * plus chat pane, article-selection panel, and the highlighted case viewer.
 *
 * Rendering is a full redraw of the dynamic regions from UiState. Hover boxes
 * are plain child elements toggled by CSS, so they exist (or not) in the DOM
 * exactly when the sentence has bases.
 */

import type { CaseView, Turn } from "./api.js";
import { selectedIds, type UiState } from "./state.js";

export interface Handlers {
  onNewConversation(): void;
  onOpenConversation(conversationId: string): void;
  onSend(query: string): void;
  onToggleArticle(turnId: number, articleId: string): void;
  onRegenerate(turnId: number): void;
  onSelectCase(index: number): void;
  onJumpHighlight(): void;
}

/** Static chrome; rendered once into the #app mount point. */
export function renderShell(root: HTMLElement): void {
  root.innerHTML = `
    <aside id="sidebar">
      <button id="new-conversation" type="button">New consultation</button>
      <ul id="conversation-list"></ul>
    </aside>
    <main id="workspace">
      <div id="error-banner" hidden></div>
      <section id="chat-pane">
        <div id="chat-log"></div>
        <form id="composer">
          <input id="query-input" type="text" autocomplete="off"
                 placeholder="Describe your situation or ask a legal question" />
          <button id="send-button" type="submit">Send</button>
          <span id="spinner" hidden></span>
        </form>
      </section>
      <section id="article-panel"></section>
      <section id="case-viewer"></section>
    </main>
  `;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Slice by Unicode code points; the service counts spans that way. */
function sliceChars(chars: string[], start: number, end: number): string {
  return chars.slice(Math.max(0, start), Math.min(chars.length, end)).join("");
}

// -- chat pane ---------------------------------------------------------------

function renderSentence(turnSentence: Turn["grounding"][number]): HTMLElement {
  const span = el("span", "sentence", turnSentence.text);
  if (turnSentence.bases.length === 0) return span;

  span.classList.add("grounded");
  const hover = el("div", "hover-box");
  for (const basis of turnSentence.bases) {
    const row = el("div", "basis");
    const badge = el(
      "span",
      `basis-badge kind-${basis.kind}`,
      basis.kind === "interpretation" ? "司法解释" : "法条",
    );
    row.appendChild(badge);
    row.appendChild(el("span", "basis-similarity", basis.similarity.toFixed(4)));
    row.appendChild(el("div", "basis-text", basis.text));
    hover.appendChild(row);
  }
  span.appendChild(hover);
  return span;
}

function renderResponse(turn: Turn): HTMLElement {
  const block = el("div", "response-block");
  if (turn.grounding.length === 0) {
    block.appendChild(document.createTextNode(turn.response));
    return block;
  }
  // Grounding spans cover the sentences; the text between them (delimiters
  // already travel with the sentence, this is mostly blank lines) is kept as
  // plain text so the response reads exactly as the model wrote it.
  const chars = Array.from(turn.response);
  let cursor = 0;
  for (const sentence of turn.grounding) {
    const [start, end] = sentence.char_span;
    if (start > cursor) {
      block.appendChild(document.createTextNode(sliceChars(chars, cursor, start)));
    }
    block.appendChild(renderSentence(sentence));
    cursor = Math.max(cursor, end);
  }
  if (cursor < chars.length) {
    block.appendChild(document.createTextNode(sliceChars(chars, cursor, chars.length)));
  }
  return block;
}

function renderChatLog(log: HTMLElement, state: UiState): void {
  log.textContent = "";
  if (!state.active) {
    log.appendChild(el("p", "empty-hint", "Start a consultation to ask a question."));
    return;
  }
  for (const turn of state.active.turns) {
    const item = el("div", "turn");
    item.dataset.turnId = String(turn.turn_id);
    const query = el("div", "query-block", turn.query);
    item.appendChild(query);
    item.appendChild(renderResponse(turn));
    if (turn.revision > 0) {
      item.appendChild(
        el("div", "revision-note", `revision ${turn.revision}; earlier versions are kept in the log`),
      );
    }
    log.appendChild(item);
  }
}

// -- article panel -------------------------------------------------------------

function renderArticlePanel(
  panel: HTMLElement,
  state: UiState,
  turn: Turn | null,
  handlers: Handlers,
): void {
  panel.textContent = "";
  panel.appendChild(el("h2", "panel-title", "Retrieved articles"));
  if (!turn) {
    panel.appendChild(el("p", "empty-hint", "Articles for the latest question appear here."));
    return;
  }
  const checked = new Set(selectedIds(state, turn));
  const list = el("ul", "article-list");
  for (const hit of turn.articles) {
    const row = el("li", "article-row");
    const label = el("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.className = "article-checkbox";
    box.dataset.articleId = hit.id;
    box.checked = checked.has(hit.id);
    box.disabled = state.pending !== "none";
    box.addEventListener("change", () => handlers.onToggleArticle(turn.turn_id, hit.id));
    label.appendChild(box);
    label.appendChild(el("span", "article-name", `${hit.statute} 第${hit.number}条`));
    label.appendChild(el("span", "article-score", hit.score.toFixed(3)));
    row.appendChild(label);
    row.appendChild(el("p", "article-text", hit.text));
    list.appendChild(row);
  }
  panel.appendChild(list);

  const regenerate = document.createElement("button");
  regenerate.type = "button";
  regenerate.id = "regenerate-button";
  regenerate.textContent = state.pending === "regenerating" ? "Regenerating…" : "Regenerate";
  regenerate.disabled = state.pending !== "none";
  regenerate.addEventListener("click", () => handlers.onRegenerate(turn.turn_id));
  panel.appendChild(regenerate);
}

// -- case viewer ---------------------------------------------------------------

function renderCaseBody(current: CaseView, state: UiState): HTMLElement {
  const body = el("div", "case-body");
  body.appendChild(el("h3", "case-title", current.title));
  const meta = el(
    "p",
    "case-meta",
    `retrieval score ${current.retrieval_score.toFixed(3)} · ${current.highlight_count} highlighted sentence(s)`,
  );
  body.appendChild(meta);
  if (current.source_url) {
    const link = document.createElement("a");
    link.href = current.source_url;
    link.textContent = "source";
    link.className = "case-source";
    meta.appendChild(document.createTextNode(" · "));
    meta.appendChild(link);
  }

  // Highlights are addressed by (section, char_span); their payload order is
  // the order the jump control walks them in.
  const bySection = new Map<string, { start: number; end: number; ordinal: number }[]>();
  current.highlights.forEach((h, ordinal) => {
    const spans = bySection.get(h.section) ?? [];
    spans.push({ start: h.sentence.char_span[0], end: h.sentence.char_span[1], ordinal });
    bySection.set(h.section, spans);
  });

  for (const section of current.sections) {
    const wrap = el("div", "case-section");
    wrap.appendChild(el("h4", "section-name", section.name));
    const text = el("p", "section-text");
    const spans = [...(bySection.get(section.name) ?? [])].sort((a, b) => a.start - b.start);
    const chars = Array.from(section.text);
    let cursor = 0;
    for (const span of spans) {
      if (span.start > cursor) {
        text.appendChild(document.createTextNode(sliceChars(chars, cursor, span.start)));
      }
      const mark = el("mark", "case-highlight", sliceChars(chars, span.start, span.end));
      mark.dataset.highlightIndex = String(span.ordinal);
      if (span.ordinal === state.activeHighlight) mark.classList.add("active");
      text.appendChild(mark);
      cursor = Math.max(cursor, span.end);
    }
    if (cursor < chars.length) {
      text.appendChild(document.createTextNode(sliceChars(chars, cursor, chars.length)));
    }
    wrap.appendChild(text);
    body.appendChild(wrap);
  }
  return body;
}

function renderCaseViewer(
  viewer: HTMLElement,
  state: UiState,
  turn: Turn | null,
  handlers: Handlers,
): void {
  viewer.textContent = "";
  viewer.appendChild(el("h2", "panel-title", "Similar cases"));
  if (!turn || turn.cases.length === 0) {
    viewer.appendChild(el("p", "empty-hint", "Related cases appear here."));
    return;
  }

  const tabs = el("div", "case-tabs");
  turn.cases.forEach((item, index) => {
    const tab = document.createElement("button");
    tab.type = "button";
    tab.className = "case-tab";
    tab.dataset.index = String(index);
    tab.textContent = `Case ${index + 1}`;
    tab.title = item.title;
    if (index === state.activeCaseIndex) tab.classList.add("active");
    tab.addEventListener("click", () => handlers.onSelectCase(index));
    tabs.appendChild(tab);
  });
  viewer.appendChild(tabs);

  const current = turn.cases[state.activeCaseIndex];
  viewer.appendChild(renderCaseBody(current, state));

  const jump = document.createElement("button");
  jump.type = "button";
  jump.id = "jump-highlight";
  jump.textContent = "Next highlight";
  jump.disabled = current.highlight_count === 0;
  jump.addEventListener("click", () => handlers.onJumpHighlight());
  viewer.appendChild(jump);
}

// -- top level -------------------------------------------------------------------

function renderSidebar(root: HTMLElement, state: UiState, handlers: Handlers): void {
  const list = root.querySelector("#conversation-list") as HTMLElement;
  list.textContent = "";
  for (const summary of state.conversations) {
    const row = el("li", "conversation-row");
    const open = document.createElement("button");
    open.type = "button";
    open.className = "conversation-link";
    open.dataset.conversationId = summary.conversation_id;
    open.textContent = summary.title || "(untitled)";
    if (state.active && state.active.conversation_id === summary.conversation_id) {
      open.classList.add("active");
    }
    open.addEventListener("click", () => handlers.onOpenConversation(summary.conversation_id));
    row.appendChild(open);
    list.appendChild(row);
  }
}

function renderComposer(root: HTMLElement, state: UiState): void {
  const input = root.querySelector("#query-input") as HTMLInputElement;
  const send = root.querySelector("#send-button") as HTMLButtonElement;
  const spinner = root.querySelector("#spinner") as HTMLElement;
  const busy = state.pending !== "none";
  input.disabled = busy;
  send.disabled = busy;
  spinner.hidden = !busy;
  spinner.textContent =
    state.pending === "sending" ? "Generating…" : state.pending === "regenerating" ? "Regenerating…" : "";
}

function renderBanner(root: HTMLElement, state: UiState): void {
  const banner = root.querySelector("#error-banner") as HTMLElement;
  banner.hidden = state.error === null;
  banner.textContent = state.error ?? "";
}

/** Redraws every dynamic region from the current state. */
export function renderAll(root: HTMLElement, state: UiState, handlers: Handlers): void {
  const latest = state.active && state.active.turns.length > 0
    ? state.active.turns[state.active.turns.length - 1]
    : null;
  renderSidebar(root, state, handlers);
  renderBanner(root, state);
  renderChatLog(root.querySelector("#chat-log") as HTMLElement, state);
  renderArticlePanel(root.querySelector("#article-panel") as HTMLElement, state, latest, handlers);
  renderCaseViewer(root.querySelector("#case-viewer") as HTMLElement, state, latest, handlers);
  renderComposer(root, state);
}

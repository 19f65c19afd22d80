/**
 * Controller: wires the API client, the pure state transitions, and the
 * renderer together. One mutation may be in flight per conversation; while it
 * runs the composer and the regenerate controls are disabled, mirroring the
 * service's own busy rule.
 */

import { ApiError, type ApiClient } from "./api.js";
import type { Handlers } from "./render.js";
import { renderAll, renderShell } from "./render.js";
import {
  adoptTurn,
  initialState,
  nextHighlight,
  openConversation,
  selectCase,
  selectedIds,
  toggleArticle,
  type UiState,
} from "./state.js";

export class App {
  readonly state: UiState = initialState();

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
  ) {
    renderShell(root);
    this.wireChrome();
    this.render();
  }

  /** Load the conversation list and open the newest one, if any. */
  async boot(): Promise<void> {
    await this.refreshList();
    const first = this.state.conversations[0];
    if (first) {
      await this.open(first.conversation_id);
    } else {
      this.render();
    }
  }

  async refreshList(): Promise<void> {
    try {
      this.state.conversations = await this.client.listConversations();
    } catch (err) {
      this.state.error = describe(err);
    }
    this.render();
  }

  async newConversation(): Promise<void> {
    if (this.state.pending !== "none") return;
    try {
      const created = await this.client.createConversation();
      await this.refreshList();
      await this.open(created.conversation_id);
    } catch (err) {
      this.state.error = describe(err);
      this.render();
    }
  }

  async open(conversationId: string): Promise<void> {
    if (this.state.pending !== "none") return;
    try {
      const conversation = await this.client.getConversation(conversationId);
      openConversation(this.state, conversation);
    } catch (err) {
      this.state.error = describe(err);
    }
    this.render();
  }

  async send(query: string): Promise<void> {
    if (this.state.pending !== "none" || !query.trim()) return;
    if (!this.state.active) {
      await this.newConversation();
      if (!this.state.active) return;
    }
    const conversationId = this.state.active.conversation_id;
    this.state.pending = "sending";
    this.state.error = null;
    this.render();
    try {
      const turn = await this.client.postMessage(conversationId, query);
      adoptTurn(this.state, turn);
      this.clearInput();
      this.state.pending = "none";
      this.render();
      await this.refreshList(); // first message sets the title
    } catch (err) {
      this.state.error = describe(err);
      this.state.pending = "none";
      this.render();
    }
  }

  async regenerate(turnId: number): Promise<void> {
    if (this.state.pending !== "none" || !this.state.active) return;
    const turn = this.state.active.turns.find((t) => t.turn_id === turnId);
    if (!turn) return;
    const ids = selectedIds(this.state, turn);
    this.state.pending = "regenerating";
    this.state.error = null;
    this.render();
    try {
      const revised = await this.client.regenerate(
        this.state.active.conversation_id,
        turnId,
        ids,
      );
      adoptTurn(this.state, revised);
    } catch (err) {
      // Keep the previous response on screen; only the banner changes.
      this.state.error = describe(err);
    }
    this.state.pending = "none";
    this.render();
  }

  toggle(turnId: number, articleId: string): void {
    const turn = this.state.active?.turns.find((t) => t.turn_id === turnId);
    if (!turn || this.state.pending !== "none") return;
    toggleArticle(this.state, turn, articleId);
    this.render();
  }

  showCase(index: number): void {
    const turn = this.latestTurn();
    if (!turn) return;
    selectCase(this.state, turn, index);
    this.render();
  }

  jumpHighlight(): void {
    const turn = this.latestTurn();
    if (!turn || turn.cases.length === 0) return;
    const current = turn.cases[this.state.activeCaseIndex];
    this.state.activeHighlight = nextHighlight(
      this.state.activeHighlight,
      current.highlights.length,
    );
    this.render();
    const mark = this.root.querySelector(
      `mark.case-highlight[data-highlight-index="${this.state.activeHighlight}"]`,
    ) as HTMLElement | null;
    // jsdom has no layout; scrollIntoView only exists in real browsers
    if (mark && typeof mark.scrollIntoView === "function") {
      mark.scrollIntoView({ block: "center" });
    }
  }

  render(): void {
    renderAll(this.root, this.state, this.handlers());
  }

  private latestTurn() {
    const turns = this.state.active?.turns ?? [];
    return turns.length > 0 ? turns[turns.length - 1] : null;
  }

  private clearInput(): void {
    const input = this.root.querySelector("#query-input") as HTMLInputElement | null;
    if (input) input.value = "";
  }

  private handlers(): Handlers {
    return {
      onNewConversation: () => void this.newConversation(),
      onOpenConversation: (id) => void this.open(id),
      onSend: (query) => void this.send(query),
      onToggleArticle: (turnId, articleId) => this.toggle(turnId, articleId),
      onRegenerate: (turnId) => void this.regenerate(turnId),
      onSelectCase: (index) => this.showCase(index),
      onJumpHighlight: () => this.jumpHighlight(),
    };
  }

  /** Static chrome listeners; these elements survive redraws. */
  private wireChrome(): void {
    const newButton = this.root.querySelector("#new-conversation") as HTMLButtonElement;
    newButton.addEventListener("click", () => void this.newConversation());
    const composer = this.root.querySelector("#composer") as HTMLFormElement;
    composer.addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.root.querySelector("#query-input") as HTMLInputElement;
      void this.send(input.value);
    });
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}

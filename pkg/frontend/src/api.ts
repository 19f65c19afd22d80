/**
 * Typed client for the consultation service HTTP API.
 *
 * The UI performs no retrieval or scoring of its own: every number and every
 * piece of text it shows comes out of these payloads unchanged.
 */

export interface ConversationSummary {
  conversation_id: string;
  title: string;
  created_at: string;
}

export interface Basis {
  kind: string; // "article" or "interpretation"
  doc_id: string;
  similarity: number;
  text: string;
}

export interface GroundedSentence {
  index: number;
  text: string;
  char_span: [number, number];
  bases: Basis[];
}

export interface ArticleHit {
  id: string;
  statute: string;
  number: number;
  text: string;
  score: number;
  rank: number;
}

export interface CaseSection {
  name: string;
  text: string;
}

export interface CaseHighlight {
  section: string;
  sentence: { index: number; text: string; char_span: [number, number] };
  similarity: number;
}

export interface CaseView {
  case_id: string;
  title: string;
  retrieval_score: number;
  final_rank: number;
  highlight_count: number;
  highlights: CaseHighlight[];
  sections: CaseSection[];
  source_url: string | null;
}

export interface Turn {
  turn_id: number;
  query: string;
  shown_articles: { shown: string[]; selected: string[] };
  used_articles: string[];
  articles: ArticleHit[];
  response: string;
  grounding: GroundedSentence[];
  cases: CaseView[];
  created_at: string;
  revision: number;
}

export interface Conversation {
  conversation_id: string;
  title: string;
  created_at: string;
  turns: Turn[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(path, init);
  } catch (err) {
    throw new ApiError(0, "unreachable", String(err));
  }
  if (!response.ok) {
    // Service errors arrive as {"error": code, "detail": text}; anything
    // else (proxy pages, truncated bodies) falls back to the status line.
    let code = "http_error";
    let detail = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { error?: unknown; detail?: unknown };
      if (typeof body.error === "string") code = body.error;
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the fallback
    }
    throw new ApiError(response.status, code, detail);
  }
  return (await response.json()) as T;
}

function post<T>(path: string, body?: unknown): Promise<T> {
  const init: RequestInit = { method: "POST" };
  if (body !== undefined) {
    init.headers = { "Content-Type": "application/json" };
    init.body = JSON.stringify(body);
  }
  return request<T>(path, init);
}

/** The full surface the UI is allowed to touch. */
export interface ApiClient {
  createConversation(): Promise<{ conversation_id: string }>;
  listConversations(): Promise<ConversationSummary[]>;
  getConversation(conversationId: string): Promise<Conversation>;
  postMessage(conversationId: string, query: string): Promise<Turn>;
  regenerate(conversationId: string, turnId: number, selectedArticleIds: string[]): Promise<Turn>;
}

export const api: ApiClient = {
  createConversation: () => post("/api/conversations"),
  listConversations: () => request("/api/conversations"),
  getConversation: (conversationId) =>
    request(`/api/conversations/${encodeURIComponent(conversationId)}`),
  postMessage: (conversationId, query) =>
    post(`/api/conversations/${encodeURIComponent(conversationId)}/messages`, { query }),
  regenerate: (conversationId, turnId, selectedArticleIds) =>
    post(
      `/api/conversations/${encodeURIComponent(conversationId)}/turns/${turnId}/regenerate`,
      { selected_article_ids: selectedArticleIds },
    ),
};

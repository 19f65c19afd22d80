/**
 * Payload builders shaped exactly like the service's wire format. Spans are
 * code-point offsets, so fixtures compute them the same way.
 */

import type {
  ArticleHit,
  Basis,
  CaseView,
  Conversation,
  ConversationSummary,
  GroundedSentence,
  Turn,
} from "../src/api.js";

export function cp(text: string): number {
  return Array.from(text).length;
}

export const SHOWN = ["cc-1093", "cc-1098", "cc-1102", "cc-1104", "cc-1105"];
const NUMBERS = [1093, 1098, 1102, 1104, 1105];
const ARTICLE_TEXTS = [
  "下列未成年人，可以被收养：丧失父母的孤儿。",
  "收养人应当同时具备抚养教育和保护被收养人的能力。",
  "收养人、送养人要求保守收养秘密的，其他人应当尊重其意愿。",
  "无配偶者收养异性子女的，应当符合法定的年龄差要求。",
  "收养关系自登记之日起成立。",
];

interface ResponsePart {
  text: string;
  bases?: Basis[];
  /** Text that sits between sentences (blank lines); not a sentence itself. */
  gap?: boolean;
}

/** Assemble a response string plus grounding entries with correct spans. */
export function buildGrounding(parts: ResponsePart[]): {
  response: string;
  grounding: GroundedSentence[];
} {
  const grounding: GroundedSentence[] = [];
  let response = "";
  let offset = 0;
  let index = 0;
  for (const part of parts) {
    const start = offset;
    const end = start + cp(part.text);
    response += part.text;
    offset = end;
    if (!part.gap) {
      grounding.push({
        index: index++,
        text: part.text,
        char_span: [start, end],
        bases: part.bases ?? [],
      });
    }
  }
  return { response, grounding };
}

export function makeArticles(): ArticleHit[] {
  return SHOWN.map((id, i) => ({
    id,
    statute: "中华人民共和国民法典",
    number: NUMBERS[i],
    text: ARTICLE_TEXTS[i],
    score: 8.4 - i * 1.1,
    rank: i,
  }));
}

/** 案例 fixtures: case 0 has two highlights, case 2 none, the rest one. */
export function makeCases(n: number): CaseView[] {
  const s1 = "本院经审理查明，被告人甲某收养乙某多年。";
  const s2 = "法院认为其具备抚养教育和保护被收养人的能力。";
  const s3 = "依照有关规定，判决如下。";
  const text = s1 + s2 + s3;
  const cases: CaseView[] = [];
  for (let i = 0; i < n; i++) {
    const highlights: CaseView["highlights"] = [];
    if (i !== 2) {
      highlights.push({
        section: "proceeding",
        sentence: { index: 1, text: s2, char_span: [cp(s1), cp(s1) + cp(s2)] },
        similarity: 0.91 - i * 0.005,
      });
    }
    if (i === 0) {
      highlights.push({
        section: "proceeding",
        sentence: { index: 0, text: s1, char_span: [0, cp(s1)] },
        similarity: 0.77,
      });
    }
    cases.push({
      case_id: `case-${String(i).padStart(3, "0")}`,
      title: `收养关系纠纷案（${i + 1}）`,
      retrieval_score: 40 - i,
      final_rank: i,
      highlight_count: highlights.length,
      highlights,
      sections: [
        { name: "proceeding", text },
        { name: "judgement", text: "维持原判。" },
      ],
      source_url: null,
    });
  }
  return cases;
}

export function makeTurn(over: Partial<Turn> = {}): Turn {
  const { response, grounding } = buildGrounding([
    {
      text: "根据中华人民共和国民法典第1098条：收养人应当同时具备抚养教育和保护被收养人的能力。",
      bases: [
        {
          kind: "article",
          doc_id: "cc-1098",
          similarity: 0.9731,
          text: ARTICLE_TEXTS[1],
        },
        {
          kind: "interpretation",
          doc_id: "interp-3",
          similarity: 0.8812,
          text: "本条所称抚养教育能力，包括经济能力与健康状况。",
        },
      ],
    },
    { text: "\n", gap: true },
    {
      text: "根据中华人民共和国民法典第1093条：丧失父母的孤儿可以被收养。",
      bases: [
        { kind: "article", doc_id: "cc-1093", similarity: 0.9215, text: ARTICLE_TEXTS[0] },
      ],
    },
    { text: "\n", gap: true },
    { text: "如有进一步情况请补充说明。" },
  ]);
  return {
    turn_id: 1,
    query: "收养人需要具备什么条件？",
    shown_articles: { shown: [...SHOWN], selected: [] },
    used_articles: SHOWN.slice(0, 3),
    articles: makeArticles(),
    response,
    grounding,
    cases: makeCases(15),
    created_at: "2026-08-14T08:00:00+00:00",
    revision: 0,
    ...over,
  };
}

export function makeConversation(turns: Turn[], id = "conv-1"): Conversation {
  return {
    conversation_id: id,
    title: turns[0] ? Array.from(turns[0].query).slice(0, 30).join("") : "",
    created_at: "2026-08-14T07:59:00+00:00",
    turns,
  };
}

export function summaryOf(conversation: Conversation): ConversationSummary {
  return {
    conversation_id: conversation.conversation_id,
    title: conversation.title,
    created_at: conversation.created_at,
  };
}

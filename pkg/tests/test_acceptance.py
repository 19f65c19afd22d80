"""Release acceptance criteria.

Each test carries an `acceptance` marker; the terminal summary prints one
PASS/FAIL line per criterion. Tolerances are stated inline: oracle
equivalences at 1e-9, the worked NDCG case at 1e-5, identical-text
similarity at 1e-12, threshold decisions and counts exact.
"""

import json
import random
import time
from collections import Counter
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from ella import bm25
from ella.case_retrieval import (
    CaseSearcher,
    build_case_store,
    highlight_case,
    retrieve_cases,
)
from ella.config import RetrievalConfig
from ella.corpus import Article, CaseSection, CorpusBundle, LegalCase
from ella.embedding import (
    ROLE_CASE_RETRIEVER,
    ROLE_GROUNDER,
    EmbeddingClient,
    EmbeddingProviderRef,
    cosine,
    mock_embed,
)
from ella.evaluation import ndcg_at_k
from ella.events import EVENT_TURN_REQUESTED
from ella.grounding import Grounder
from ella.pair_mining import MiningInput, MiningItem, SplitSpec, mine_pairs, split_dataset
from ella.service import ConsultEngine, create_app
from ella.textseg import split_sentences

from fixture_corpus import FIXTURE_ARTICLES, FIXTURE_INTERPRETATIONS
from helpers import CapturingLlm
from oracles import bm25_oracle, bm25_top_k_oracle, ndcg_oracle, pairwise_grounding_oracle

GOLDEN_SPLIT = Path(__file__).parent / "data" / "split_seed42.json"

VOCAB = [
    "fa", "yuan", "shou", "yang", "min", "zheng", "bu", "men",
    "deng", "ji", "pan", "jue", "li", "hun", "zi", "nv",
]


def mock_client(role: str) -> EmbeddingClient:
    return EmbeddingClient(EmbeddingProviderRef(role, "mock", 256))


@pytest.mark.acceptance("ndcg-oracle-equivalence")
def test_ndcg_matches_oracle_on_random_instances():
    """1,000 random instances (<= 8 docs, grades 0-3), |delta| <= 1e-9, < 5 s."""
    rng = random.Random(20240817)
    start = time.perf_counter()
    for _ in range(1000):
        n_docs = rng.randint(1, 8)
        doc_ids = [f"d{i}" for i in range(n_docs)]
        rels = {doc_id: rng.randint(0, 3) for doc_id in doc_ids}
        ranking = rng.sample(doc_ids, k=rng.randint(0, n_docs))
        if rng.random() < 0.25:
            ranking.append("unjudged-doc")
        k = rng.randint(1, 10)
        assert abs(ndcg_at_k(ranking, rels, k) - ndcg_oracle(ranking, rels, k)) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"1000 oracle comparisons took {elapsed:.2f}s"


@pytest.mark.acceptance("ndcg-boundary-suite")
def test_ndcg_boundary_values():
    """Ideal ranking 1.0 exactly; all-zero 0.0; worked 2-doc case 0.63093 +/- 1e-5."""
    rels = {"a": 3, "b": 2, "c": 1, "d": 0}
    assert ndcg_at_k(["a", "b", "c", "d"], rels, 10) == 1.0
    assert ndcg_at_k(["a", "b"], {"a": 0, "b": 0}, 5) == 0.0
    assert ndcg_at_k(["B", "A"], {"A": 1, "B": 0}, 2) == pytest.approx(0.63093, abs=1e-5)


@pytest.mark.acceptance("bm25-oracle-equivalence")
def test_bm25_matches_oracle_on_random_corpora():
    """200 random corpora (<= 20 docs, <= 30 tokens), |delta| <= 1e-9; zero overlap -> 0."""
    rng = random.Random(987)
    for _ in range(200):
        n_docs = rng.randint(1, 20)
        docs = [
            (
                f"doc-{i:02d}",
                " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 30))),
            )
            for i in range(n_docs)
        ]
        index = bm25.build_index(docs)
        query = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 6)))

        for doc_id, _ in docs:
            got = bm25.score(index, query, doc_id)
            assert abs(got - bm25_oracle(docs, query, doc_id)) <= 1e-9
            assert bm25.score(index, "zzz qqq", doc_id) == 0.0

        k = rng.randint(1, n_docs + 2)
        got_top = bm25.top_k(index, query, k)
        want_top = bm25_top_k_oracle(docs, query, k)
        assert [hit.doc_id for hit in got_top] == [doc_id for doc_id, _ in want_top]
        for hit, (_, want_score) in zip(got_top, want_top):
            assert abs(hit.score - want_score) <= 1e-9


def random_mining_input(rng: random.Random, sentence_counts=(3, 3, 3)) -> MiningInput:
    items = []
    for i, count in enumerate(sentence_counts):
        article = Article(
            f"art-{i}",
            "民法典",
            1000 + i,
            " ".join(rng.choice(VOCAB) for _ in range(rng.randint(6, 12))),
        )
        sentences = [
            " ".join(rng.choice(VOCAB) for _ in range(rng.randint(2, 6)))
            for _ in range(count)
        ]
        items.append(MiningItem(article, "。".join(sentences) + "。"))
    return MiningInput("q", "查询", tuple(items))


@pytest.mark.acceptance("mining-pair-counts")
def test_mining_pair_counts_and_positive_optimality():
    """3 responses of >= 3 sentences -> 15 pairs with the fixed source multiset;
    a 1-sentence item -> 3 pairs; positives attain max oracle BM25 (1e-9)."""
    rng = random.Random(4242)
    for _ in range(8):
        mining_input = random_mining_input(rng)
        pairs = mine_pairs(mining_input)
        assert len(pairs) == 15
        assert Counter(p.source for p in pairs) == Counter(
            {"intra_best": 3, "intra_worst": 6, "cross_article": 6}
        )
        for item in mining_input.items:
            sentences = [s.text for s in split_sentences(item.response)]
            oracle_scores = [
                bm25_oracle([(item.article.id, item.article.text)], s, item.article.id)
                for s in sentences
            ]
            positive = next(
                p.sentence
                for p in pairs
                if p.source == "intra_best" and p.article_id == item.article.id
            )
            got = bm25_oracle(
                [(item.article.id, item.article.text)], positive, item.article.id
            )
            assert got >= max(oracle_scores) - 1e-9

    degenerate = random_mining_input(rng, sentence_counts=(1, 3, 3))
    pairs = mine_pairs(degenerate)
    assert len(pairs) == 13
    lone = split_sentences(degenerate.items[0].response)[0].text
    assert sum(1 for p in pairs if p.sentence == lone) == 3
    assert not any(
        p.article_id == degenerate.items[0].article.id and p.source == "intra_worst"
        for p in pairs
    )


@pytest.mark.acceptance("grounding-threshold-exactness")
def test_grounding_decisions_match_exhaustive_scan():
    """Pairwise cosine scan (15 sources x 16 sentences) agrees with ground()
    at Thr1 = 0.85 with zero disagreements; identical text -> similarity 1.0 (1e-12)."""
    bundle = CorpusBundle(
        tuple(FIXTURE_ARTICLES), tuple(FIXTURE_INTERPRETATIONS), ()
    )
    sources = [("article", a.id, a.text) for a in FIXTURE_ARTICLES] + [
        ("interpretation", j.id, j.text) for j in FIXTURE_INTERPRETATIONS
    ]
    assert len(sources) <= 50

    copies = [a.text for a in FIXTURE_ARTICLES[:5]]
    copies += [j.text for j in FIXTURE_INTERPRETATIONS[:2]]
    echoes = [
        f"根据{a.statute}第{a.number}条：{a.text}" for a in FIXTURE_ARTICLES[5:9]
    ]
    fillers = [
        "本院认为双方争议焦点在于合同效力",
        "天气预报说明天有雨",
        "the quick brown fox jumps over the lazy dog",
        "条例",
    ]
    lines = copies + echoes + fillers
    assert len(lines) <= 20

    cfg = RetrievalConfig()
    grounder = Grounder(bundle, mock_client(ROLE_GROUNDER), cfg)
    grounded = grounder.ground("\n".join(lines))
    assert [g.sentence.text for g in grounded] == lines

    oracle = pairwise_grounding_oracle(lines, sources, cfg.thr1_grounding)
    engine_sets = [{(b.kind, b.doc_id) for b in g.bases} for g in grounded]
    assert engine_sets == oracle

    for i, text in enumerate(copies):
        kind, doc_id, _ = sources[i if i < 5 else 12 + (i - 5)]
        basis = next(b for b in grounded[i].bases if b.doc_id == doc_id)
        assert basis.similarity == pytest.approx(1.0, abs=1e-12)


CASE_QUERY = "收养人应当具备抚养教育和保护被收养人的能力"
CASE_FILLERS = [
    "本案原告与被告因房屋买卖合同产生纠纷",
    "双方当事人均到庭参加诉讼",
    "判决书送达后十五日内可以上诉",
    "证据材料经庭审质证后予以采信",
    "诉讼费用由败诉方承担",
]


def synth_case(i: int) -> LegalCase:
    sentences = []
    for p in range(i % 4):
        sentences.append(CASE_QUERY + "，并经民政部门评估" * p)
    for f in range(2 + i % 3):
        sentences.append(CASE_FILLERS[(i + f) % len(CASE_FILLERS)])
    text = "。".join(sentences) + "。"
    return LegalCase(f"case-{i:03d}", f"案例{i}", (CaseSection("proceeding", text),))


@pytest.mark.acceptance("case-pipeline-depths")
def test_case_pipeline_on_sixty_cases():
    """60 cases: exactly 50 retrieved, exactly 15 after re-rank, order equal to
    a brute-force (count desc, score desc, id asc) sort; Thr2 0.65 -> 0.95
    never increases a highlight count."""
    cases = [synth_case(i) for i in range(60)]
    bundle = CorpusBundle((), (), tuple(cases))
    cfg = RetrievalConfig()
    client = mock_client(ROLE_CASE_RETRIEVER)

    store = build_case_store(bundle, client)
    query_vec = client.embed_batch([CASE_QUERY])[0]
    hits = retrieve_cases(query_vec, store, cfg)
    assert len(hits) == 50

    searcher = CaseSearcher(bundle, client, cfg)
    result = searcher.search(CASE_QUERY)
    assert len(result) == 15

    # brute force from the embedding primitives only
    def case_sim(case):
        return cosine(query_vec, mock_embed("\n".join(s.text for s in case.sections)))

    def count_highlights(case, thr):
        return sum(
            1
            for sentence in split_sentences(case.sections[0].text)
            if cosine(query_vec, mock_embed(sentence.text)) >= thr
        )

    retrieved = sorted(((case_sim(c), c.id) for c in cases), key=lambda p: (-p[0], p[1]))[:50]
    counts = {cid: count_highlights(bundle.get("case", cid), cfg.thr2_highlight) for _, cid in retrieved}
    expected = sorted(retrieved, key=lambda p: (-counts[p[1]], -p[0], p[1]))[:15]
    assert [c.case_id for c in result] == [cid for _, cid in expected]
    assert [c.final_rank for c in result] == list(range(15))
    for c in result:
        assert c.highlight_count == counts[c.case_id]

    cfg95 = RetrievalConfig(thr2_highlight=0.95)
    for case in cases:
        low = len(highlight_case(query_vec, case, client, cfg))
        high = len(highlight_case(query_vec, case, client, cfg95))
        assert high <= low


@pytest.mark.acceptance("split-determinism")
def test_split_sizes_repeatability_and_golden_file():
    """100 ids -> 80/10/10; two same-seed runs identical; seed-42 golden match."""
    golden = json.loads(GOLDEN_SPLIT.read_text("utf-8"))
    ids = golden["ids"]
    assert len(ids) == 100

    first = split_dataset(ids, SplitSpec(seed=42))
    second = split_dataset(list(reversed(ids)), SplitSpec(seed=42))
    assert (len(first["train"]), len(first["valid"]), len(first["test"])) == (80, 10, 10)
    assert first == second
    assert first == {key: golden[key] for key in ("train", "valid", "test")}


@pytest.mark.acceptance("e2e-mock-run")
def test_end_to_end_mock_consultation(app_config):
    """12-article corpus, mock providers: shown <= 10, used = top-3, every echoed
    sentence grounds to its source, regenerate uses exactly the two chosen
    articles (captured prompt), whole flow < 2 s."""
    llm = CapturingLlm()
    engine = ConsultEngine(app_config, llm_client=llm)
    assert len(engine.bundle.articles) == 12

    start = time.perf_counter()
    cid = engine.create_conversation()["conversation_id"]
    turn = engine.post_message(cid, CASE_QUERY)

    shown = turn["shown_articles"]["shown"]
    assert len(shown) <= 10
    assert turn["used_articles"] == shown[:3]

    echoed = turn["response"].split("\n")[:-1]
    assert len(echoed) == 3
    for doc_id, entry in zip(turn["used_articles"], turn["grounding"]):
        hits = {(b["kind"], b["doc_id"]) for b in entry["bases"]}
        assert ("article", doc_id) in hits

    chosen = [shown[1], shown[4]]
    new_turn = engine.regenerate(cid, 0, chosen)
    elapsed = time.perf_counter() - start
    assert elapsed < 2.0, f"consultation flow took {elapsed:.2f}s"

    prompt = llm.prompts[-1]
    block = prompt.split("[参考法条]\n", 1)[1].split("[咨询问题]", 1)[0]
    lines = [line for line in block.split("\n") if line]
    expected = sorted(
        (engine.bundle.get("article", doc_id) for doc_id in chosen),
        key=lambda a: (a.statute, a.number),
    )
    assert lines == [f"{a.statute}第{a.number}条：{a.text}" for a in expected]
    assert new_turn["used_articles"] == [a.id for a in expected]
    assert new_turn["revision"] == 1


@pytest.mark.acceptance("durability-byte-identical-replay")
def test_restart_replays_byte_identical_responses(app_config):
    """Restart mid-session: every conversation GET is byte-identical after replay."""
    engine = ConsultEngine(app_config)
    client = TestClient(create_app(engine))

    cid_a = client.post("/api/conversations").json()["conversation_id"]
    client.post(f"/api/conversations/{cid_a}/messages", json={"query": CASE_QUERY})
    client.post(f"/api/conversations/{cid_a}/messages", json={"query": "送养人有哪些条件"})
    shown = client.get(f"/api/conversations/{cid_a}").json()["turns"][0]["shown_articles"]["shown"]
    client.post(
        f"/api/conversations/{cid_a}/turns/0/regenerate",
        json={"selected_article_ids": shown[:2]},
    )
    cid_b = client.post("/api/conversations").json()["conversation_id"]
    client.post(f"/api/conversations/{cid_b}/messages", json={"query": CASE_QUERY})
    # a kill mid-generation leaves a dangling request record behind
    engine.log.append(
        cid_b,
        {
            "type": EVENT_TURN_REQUESTED,
            "turn_id": 1,
            "query": "再问一句",
            "requested_at": "2026-01-01T00:00:00+00:00",
        },
    )

    before = {
        cid: client.get(f"/api/conversations/{cid}").content for cid in (cid_a, cid_b)
    }
    listing_before = client.get("/api/conversations").content

    reborn = TestClient(create_app(ConsultEngine(app_config)))
    for cid, payload in before.items():
        assert reborn.get(f"/api/conversations/{cid}").content == payload
    assert reborn.get("/api/conversations").content == listing_before

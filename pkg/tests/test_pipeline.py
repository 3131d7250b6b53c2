"""Pipeline orchestration: size parity, dedup, determinism, golden prompts."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from pragqa.corpus import Passage
from pragqa.errors import CorpusExhausted, StageFailure
from pragqa.pipeline import (
    AnswerBundle,
    Backends,
    PipelineConfig,
    QAEngine,
    build_extractive_reader_prompt,
    build_reader_prompt,
)
from pragqa.retrieval import build_index
from pragqa.stubs import StubCompletion, StubEmbedding, StubRerank, stub_embed

from conftest import make_corpus, make_engine

GOLDEN = Path(__file__).parent / "golden"


def _passages(texts):
    return [Passage(id=f"p{i}", doc_id="d", seq_index=i, text=t, token_count=len(t.split()))
            for i, t in enumerate(texts)]


# ------------------------------------------------------------ reader prompts

def test_reader_baseline_matches_golden():
    passages = [
        Passage(id="d0:0", doc_id="d0", seq_index=0,
                text="Most infant fevers resolve on their own with hydration and rest.",
                token_count=11),
        Passage(id="d1:0", doc_id="d1", seq_index=0,
                text="Call a pediatrician for any fever in a baby under three months.",
                token_count=12),
    ]
    question = "Should I worry about my baby's fever?"
    built = build_reader_prompt("baseline", passages, question, [])
    assert built == (GOLDEN / "reader_baseline.txt").read_text(encoding="utf-8")
    assert "do not reveal that you are fetching information" in built

    augmented = build_reader_prompt("augmented", passages, question, [
        "Fevers in babies are always dangerous.",
        "Medication is required for every fever.",
    ])
    assert augmented == (GOLDEN / "reader_augmented.txt").read_text(encoding="utf-8")
    assert "your answer must address assumptions made by the asker listed below." in augmented

    extractive = build_extractive_reader_prompt(passages, question)
    assert extractive == (GOLDEN / "reader_extractive.txt").read_text(encoding="utf-8")
    assert "allowed to only use information from the passages above" in extractive


def test_reader_prompt_lists_each_passage_once_in_order():
    passages = _passages(["first text", "second text", "third text"])
    built = build_reader_prompt("baseline", passages, "q?", [])
    positions = [built.index(p.text) for p in passages]
    assert positions == sorted(positions)
    for p in passages:
        assert built.count(p.text) == 1
    for i in range(1, 4):
        assert f"Source {i}:" in built


def test_reader_prompt_preconditions():
    with pytest.raises(ValueError):
        build_reader_prompt("baseline", [], "q", [])
    with pytest.raises(ValueError):
        build_reader_prompt("augmented", _passages(["x"]), "q", [])


# ------------------------------------------------------------------ baseline

def test_baseline_reading_set_sizes(small_engine):
    bundle = small_engine.run_baseline("Is a fever dangerous for my infant?", k=2)
    assert bundle.mode == "baseline"
    assert bundle.k == 2
    assert bundle.inferences_used == []
    assert len(bundle.reading_set) == 7

    bundle0 = small_engine.run_baseline("Is a fever dangerous for my infant?", k=0)
    assert len(bundle0.reading_set) == 5
    assert [p.id for p in bundle0.reading_set] == [p.id for p in bundle.reading_set[:5]]


def test_baseline_matches_hand_recomputation():
    passages = make_corpus(n_docs=3, tokens_per_doc=40, chunk_size=10)
    engine = make_engine(passages=passages, dim=12, n_retrieve=12)
    question = "infant fever hydration"
    bundle = engine.run_baseline(question, k=1)

    # oracle: stub cosine ranking -> stub token-overlap rerank -> prefix of 6
    dim = 12
    qv = stub_embed(question, dim).values
    cosines = {}
    for p in passages:
        pv = stub_embed(p.text, dim).values
        cosines[p.id] = sum(a * b for a, b in zip(qv, pv))
    pool_ids = sorted(cosines, key=lambda pid: (-cosines[pid], pid))[:12]
    by_id = {p.id: p for p in passages}

    def overlap(text):
        have = text.lower().split()
        return sum(1 for tok in question.lower().split() if tok in have)

    reranked = sorted(range(len(pool_ids)),
                      key=lambda rank: (-overlap(by_id[pool_ids[rank]].text), rank))
    expected = [pool_ids[rank] for rank in reranked[:6]]
    assert [p.id for p in bundle.reading_set] == expected


def test_baseline_corpus_exhausted():
    engine = make_engine(passages=make_corpus(n_docs=1, tokens_per_doc=30, chunk_size=10))
    with pytest.raises(CorpusExhausted):
        engine.run_baseline("any question", k=1)  # only 3 passages < 5+1


# ----------------------------------------------------------------- augmented

def test_augmented_sizes_and_uniqueness(small_engine):
    inferences = ["Fevers are always dangerous.", "Only medicine can lower a fever."]
    bundle = small_engine.run_augmented("Is a fever dangerous?", inferences)
    assert bundle.mode == "augmented"
    assert bundle.k == 2
    assert bundle.inferences_used == inferences
    assert len(bundle.reading_set) == 7
    ids = [p.id for p in bundle.reading_set]
    assert len(set(ids)) == 7
    for text in inferences:
        assert text in bundle.prompt_text


def test_augmented_empty_inferences_equals_baseline_mod_mode(small_engine):
    question = "Is a fever dangerous?"
    augmented = small_engine.run_augmented(question, [])
    baseline = small_engine.run_baseline(question, 0)
    a, b = augmented.to_dict(include_timing=False), baseline.to_dict(include_timing=False)
    assert a.pop("mode") == "augmented"
    assert b.pop("mode") == "baseline"
    assert a == b


def test_augmented_duplicate_collision_walks_down():
    # Engineer: the inference's top-overlap passage is also the question's top
    # passage, so the inference must contribute its second choice.
    texts = [
        "fever infant care advice shared tokens",   # p0: top for question AND inference
        "fever infant extra guidance notes",        # p1: second for inference
        "unrelated gardening content one",
        "unrelated carpentry content two",
        "unrelated pottery content three",
        "unrelated painting content four",
        "unrelated astronomy content five",
    ]
    passages = _passages(texts)
    engine = make_engine(passages=passages, dim=16, n_question_passages=1, n_retrieve=7)
    question = "fever infant care advice shared tokens"
    inference = "fever infant"

    bundle = engine.run_augmented(question, [inference])
    assert len(bundle.reading_set) == 2

    # oracle: hand-enumerate stub overlap scores for the inference query
    def overlap(query, text):
        have = text.lower().split()
        return sum(1 for tok in query.lower().split() if tok in have)

    question_scores = [overlap(question, t) for t in texts]
    assert question_scores[0] == max(question_scores)  # p0 wins the question side
    inference_ranking = sorted(
        range(len(texts)), key=lambda i: (-overlap(inference, texts[i]), i))
    # the collision is real: the inference's own best is p0, already taken
    assert inference_ranking[0] == 0
    assert bundle.reading_set[0].id == "p0"
    assert bundle.reading_set[1].id == f"p{inference_ranking[1]}"
    assert bundle.reading_set[1].id == "p1"


def test_augmented_corpus_exhausted_when_no_distinct_passage():
    passages = _passages(["only passage here"])
    engine = make_engine(passages=passages, dim=8, n_question_passages=1, n_retrieve=5)
    with pytest.raises(CorpusExhausted):
        engine.run_augmented("only passage here", ["an assumption"])


def test_augmented_jobs_do_not_change_output(small_engine):
    inferences = [f"assumption number {i}" for i in range(4)]
    serial = small_engine.run_augmented("Is a fever dangerous?", inferences, jobs=1)
    parallel = small_engine.run_augmented("Is a fever dangerous?", inferences, jobs=4)
    assert serial.to_json(include_timing=False) == parallel.to_json(include_timing=False)


# -------------------------------------------------------------- size parity

def test_size_parity_across_modes(small_engine):
    question = "Is it safe to bathe my baby daily?"
    for k in range(0, 4):
        baseline = small_engine.run_baseline(question, k=k)
        augmented = small_engine.run_augmented(
            question, [f"assumption {i}" for i in range(k)])
        assert len(baseline.reading_set) == 5 + k
        assert len(augmented.reading_set) == 5 + k


# -------------------------------------------------------------- determinism

def test_stub_runs_are_deterministic(small_engine):
    question = "How warm can bath water be?"
    inferences = ["Warm water is safe at any temperature.", "Babies tolerate heat like adults."]
    first = small_engine.run_augmented(question, inferences)
    second = small_engine.run_augmented(question, inferences)
    assert first.to_json(include_timing=False) == second.to_json(include_timing=False)
    b1 = small_engine.run_baseline(question, k=2)
    b2 = small_engine.run_baseline(question, k=2)
    assert b1.to_json(include_timing=False) == b2.to_json(include_timing=False)


# ------------------------------------------------------------------- bundles

def test_bundle_roundtrips_through_json(small_engine):
    bundle = small_engine.run_baseline("Is a fever dangerous?", k=1, question_id="q7")
    record = json.loads(bundle.to_json())
    restored = AnswerBundle.from_dict(record)
    assert restored.to_json() == bundle.to_json()
    assert restored.question_id == "q7"
    assert set(record["backend_ids"]) == {"embed", "rerank", "read"}
    assert "timing_ms" in record
    assert "timing_ms" not in bundle.to_dict(include_timing=False)


def test_generation_records_seed(small_engine):
    inferences, seed = small_engine.generate_question_inferences("Is honey ok for babies?")
    assert seed == 0
    assert inferences  # canned stub reply parses to a non-empty list
    bundle = small_engine.run_augmented("Is honey ok for babies?", inferences,
                                        exemplar_seed=seed)
    assert bundle.exemplar_seed == 0
    assert bundle.backend_ids.get("generate") == "stub-generate"


def test_stage_failure_carries_stage_name():
    class BrokenRerank:
        model_id = "broken"

        def rerank_score(self, instruction, query, candidates):
            from pragqa.errors import NetworkError
            raise NetworkError("boom")

        def reachable(self):
            return False

    passages = make_corpus()
    embedder = StubEmbedding(dim=8)
    engine = QAEngine(
        passages=passages,
        index=build_index(passages, embedder.embed),
        backends=Backends(embed=embedder, rerank=BrokenRerank(), read=StubCompletion()),
    )
    with pytest.raises(StageFailure) as excinfo:
        engine.run_baseline("a question", k=0)
    assert excinfo.value.stage == "rerank"


def test_pipeline_config_invariant():
    with pytest.raises(ValueError):
        PipelineConfig(n_retrieve=3, n_question_passages=5)
    with pytest.raises(ValueError):
        PipelineConfig(n_retrieve=5, n_question_passages=0)
    with pytest.raises(ValueError):
        PipelineConfig(max_context_tokens=0)


def test_context_truncation_knob_clips_prompt_not_reading_set():
    passages = make_corpus()
    limited = make_engine(passages=passages)
    limited.config = PipelineConfig(n_retrieve=100, n_question_passages=5,
                                    max_context_tokens=12)
    bundle = limited.run_baseline("Is a fever dangerous?", k=1)
    assert len(bundle.reading_set) == 6  # size parity untouched
    context = bundle.prompt_text.split("Context:\n", 1)[1].split("\n\nUsing evidence", 1)[0]
    assert len(context.split()) <= 12

    unlimited = make_engine(passages=passages)
    full = unlimited.run_baseline("Is a fever dangerous?", k=1)
    assert [p.id for p in full.reading_set] == [p.id for p in bundle.reading_set]
    assert len(full.prompt_text) > len(bundle.prompt_text)

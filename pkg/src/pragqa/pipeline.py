"""Baseline and assumption-augmented QA orchestration.

Both pipelines read exactly ``n_question_passages + k`` passages so the two
modes see the same volume of evidence and differ only in what that evidence
is and how the reader is prompted:

* baseline: retrieve by the question, rerank under the question instruction,
  read the top ``5 + k``.
* augmented: question side truncated to the top 5; each of the k inferences
  retrieves and reranks its own pool under the assumption instruction and
  contributes its best passage not already in the reading set (walking down
  its list on duplicates); the reader prompt additionally lists every
  assumption and demands they be addressed.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Protocol

from . import prompts
from .backends import CompletionRequest, EmbeddingVector
from .corpus import Passage
from .errors import (
    CorpusExhausted,
    DimensionMismatch,
    MalformedResponse,
    NetworkError,
    RateLimited,
    StageFailure,
)
from .inference import ExemplarSet, default_exemplars, generate_inferences
from .rerank import ASSUMPTION_INSTRUCTION, QUESTION_INSTRUCTION, RankedPassage, rerank, top_n
from .retrieval import VectorIndex, top_k

_BACKEND_ERRORS = (NetworkError, RateLimited, MalformedResponse, DimensionMismatch)


@dataclass(frozen=True)
class PipelineConfig:
    n_retrieve: int = 100
    n_question_passages: int = 5
    mode: str = "baseline"
    # readers with tight input limits: clip the prompt's context block to this
    # many whitespace tokens (the reading set itself keeps all 5+k passages)
    max_context_tokens: int | None = None

    def __post_init__(self):
        if not (self.n_retrieve >= self.n_question_passages >= 1):
            raise ValueError("need n_retrieve >= n_question_passages >= 1")
        if self.mode not in ("baseline", "augmented"):
            raise ValueError(f"invalid mode {self.mode!r}")
        if self.max_context_tokens is not None and self.max_context_tokens < 1:
            raise ValueError("max_context_tokens must be >= 1 when set")


@dataclass
class AnswerBundle:
    """Full trace of one pipeline run."""

    question: str
    mode: str
    k: int
    inferences_used: list[str]
    reading_set: list[Passage]
    prompt_text: str
    answer_text: str
    exemplar_seed: int | None = None
    backend_ids: dict[str, str] = field(default_factory=dict)
    timing_ms: dict[str, int] = field(default_factory=dict)
    question_id: str | None = None

    def to_dict(self, include_timing: bool = True) -> dict:
        record = {
            "question": self.question,
            "mode": self.mode,
            "k": self.k,
            "inferences_used": list(self.inferences_used),
            "reading_set": [asdict(p) for p in self.reading_set],
            "prompt_text": self.prompt_text,
            "answer_text": self.answer_text,
            "exemplar_seed": self.exemplar_seed,
            "backend_ids": dict(self.backend_ids),
            "question_id": self.question_id,
        }
        if include_timing:
            record["timing_ms"] = dict(self.timing_ms)
        return record

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing=include_timing),
                          sort_keys=True, ensure_ascii=False, indent=2)

    @classmethod
    def from_dict(cls, record: dict) -> "AnswerBundle":
        return cls(
            question=record["question"],
            mode=record["mode"],
            k=record["k"],
            inferences_used=list(record["inferences_used"]),
            reading_set=[Passage(**p) for p in record["reading_set"]],
            prompt_text=record["prompt_text"],
            answer_text=record["answer_text"],
            exemplar_seed=record.get("exemplar_seed"),
            backend_ids=dict(record.get("backend_ids", {})),
            timing_ms=dict(record.get("timing_ms", {})),
            question_id=record.get("question_id"),
        )


class EmbeddingBackend(Protocol):
    model_id: str

    def embed(self, texts: list[str]) -> list[EmbeddingVector]: ...


class CompletionBackend(Protocol):
    model_id: str

    def complete(self, req: CompletionRequest) -> str: ...


class RerankBackend(Protocol):
    model_id: str

    def rerank_score(self, instruction: str, query: str, candidates: list[str]) -> list[float]: ...


@dataclass
class Backends:
    """The per-stage backend handles one engine instance uses."""

    embed: EmbeddingBackend
    rerank: RerankBackend
    read: CompletionBackend
    generate: CompletionBackend | None = None


def format_context(passages: list[Passage], max_tokens: int | None = None) -> str:
    block = "\n\n".join(f"Source {i}: {p.text}" for i, p in enumerate(passages, start=1))
    if max_tokens is not None:
        tokens = block.split()
        if len(tokens) > max_tokens:
            block = " ".join(tokens[:max_tokens])
    return block


def build_reader_prompt(mode: str, passages: list[Passage], question: str,
                        assumptions: list[str],
                        max_context_tokens: int | None = None) -> str:
    """Render the reader prompt for ``mode`` from the built-in templates."""
    if not passages:
        raise ValueError("passages must be non-empty")
    context = format_context(passages, max_context_tokens)
    if mode == "augmented":
        if not assumptions:
            raise ValueError("augmented mode requires assumptions")
        bullet_list = "\n".join(f"- {a}" for a in assumptions)
        return prompts.READER_AUGMENTED_TEMPLATE.format(
            context=context, assumptions=bullet_list, question=question)
    if mode == "baseline":
        return prompts.READER_BASELINE_TEMPLATE.format(context=context, question=question)
    raise ValueError(f"invalid mode {mode!r}")


def build_extractive_reader_prompt(passages: list[Passage], question: str) -> str:
    """The extraction-style reader variant (passage-only wording, no Answer cue)."""
    if not passages:
        raise ValueError("passages must be non-empty")
    return prompts.READER_EXTRACTIVE_TEMPLATE.format(
        context=format_context(passages), question=question)


class _StageTimer:
    def __init__(self):
        self.timing_ms: dict[str, int] = {}

    def run(self, stage: str, fn, *args):
        start = time.monotonic()
        try:
            result = fn(*args)
        except _BACKEND_ERRORS as exc:
            raise StageFailure(stage, exc) from exc
        elapsed = int((time.monotonic() - start) * 1000)
        self.timing_ms[stage] = self.timing_ms.get(stage, 0) + elapsed
        return result


class QAEngine:
    """Shared, immutable pipeline state: the passage store, the index, the backends."""

    def __init__(self, passages: list[Passage], index: VectorIndex, backends: Backends,
                 config: PipelineConfig | None = None,
                 exemplars: ExemplarSet | None = None,
                 exemplar_seed: int = 0):
        self.passages = {p.id: p for p in passages}
        if len(self.passages) != len(passages):
            raise ValueError("duplicate passage ids")
        missing = [pid for pid in index.ids if pid not in self.passages]
        if missing:
            raise ValueError(f"index covers unknown passages: {missing[:3]}")
        self.index = index
        self.backends = backends
        self.config = config or PipelineConfig()
        self.exemplars = exemplars
        self.exemplar_seed = exemplar_seed

    @property
    def index_size(self) -> int:
        return self.index.size

    def passage(self, passage_id: str) -> Passage | None:
        return self.passages.get(passage_id)

    # ------------------------------------------------------------- stages

    def _require(self, needed: int) -> None:
        if len(self.passages) < needed:
            raise CorpusExhausted(
                f"corpus holds {len(self.passages)} passages, run needs {needed}"
            )
        if self.config.n_retrieve < needed:
            raise CorpusExhausted(
                f"n_retrieve={self.config.n_retrieve} cannot yield {needed} passages"
            )

    def _retrieve_pool(self, timer: _StageTimer, query: str) -> list[Passage]:
        vec = timer.run("embed", self.backends.embed.embed, [query])[0]
        hits = top_k(self.index, vec, self.config.n_retrieve)
        return [self.passages[h.passage_id] for h in hits]

    def _rank_question(self, timer: _StageTimer, question: str) -> list[RankedPassage]:
        pool = self._retrieve_pool(timer, question)
        return timer.run("rerank", rerank, pool, question, QUESTION_INSTRUCTION,
                         self.backends.rerank)

    def _read(self, timer: _StageTimer, prompt: str) -> str:
        return timer.run("read", self.backends.read.complete, CompletionRequest(prompt=prompt))

    def _backend_ids(self, generated: bool) -> dict[str, str]:
        ids = {
            "embed": self.backends.embed.model_id,
            "rerank": self.backends.rerank.model_id,
            "read": self.backends.read.model_id,
        }
        if generated and self.backends.generate is not None:
            ids["generate"] = self.backends.generate.model_id
        return ids

    # --------------------------------------------------------------- runs

    def run_baseline(self, question: str, k: int = 0, *,
                     question_id: str | None = None,
                     dry_run: bool = False) -> AnswerBundle:
        """Question-only pipeline padded to ``5 + k`` passages."""
        if not question.strip():
            raise ValueError("question must be non-empty")
        if k < 0:
            raise ValueError("k must be >= 0")
        needed = self.config.n_question_passages + k
        self._require(needed)
        timer = _StageTimer()
        ranked = self._rank_question(timer, question)
        if len(ranked) < needed:
            raise CorpusExhausted(f"retrieval pool has only {len(ranked)} passages")
        reading = [rp.passage for rp in top_n(ranked, needed)]
        prompt = build_reader_prompt("baseline", reading, question, [],
                                     self.config.max_context_tokens)
        answer = "" if dry_run else self._read(timer, prompt)
        return AnswerBundle(
            question=question, mode="baseline", k=k, inferences_used=[],
            reading_set=reading, prompt_text=prompt, answer_text=answer,
            backend_ids=self._backend_ids(generated=False),
            timing_ms=timer.timing_ms, question_id=question_id,
        )

    def run_augmented(self, question: str, inferences: list[str], *,
                      jobs: int = 1, exemplar_seed: int | None = None,
                      question_id: str | None = None,
                      dry_run: bool = False) -> AnswerBundle:
        """Question top-5 plus one deduplicated evidence passage per inference.

        ``inferences`` may be empty; the run then matches the k=0 baseline
        except for the mode tag. Per-inference retrieval/rerank fans out over
        ``jobs`` threads; duplicate resolution happens afterwards in inference
        order, so results do not depend on ``jobs``.
        """
        if not question.strip():
            raise ValueError("question must be non-empty")
        inferences = [i for i in inferences]
        if any(not i.strip() for i in inferences):
            raise ValueError("inferences must be non-empty strings")
        if jobs < 1:
            raise ValueError("jobs must be >= 1")
        k = len(inferences)
        if k == 0:
            bundle = self.run_baseline(question, 0, question_id=question_id, dry_run=dry_run)
            bundle.mode = "augmented"
            bundle.exemplar_seed = exemplar_seed
            return bundle
        needed = self.config.n_question_passages + k
        self._require(needed)
        timer = _StageTimer()

        ranked_q = self._rank_question(timer, question)
        reading = [rp.passage for rp in top_n(ranked_q, self.config.n_question_passages)]
        if len(reading) < self.config.n_question_passages:
            raise CorpusExhausted(f"retrieval pool has only {len(reading)} passages")

        inference_vecs = timer.run("embed", self.backends.embed.embed, inferences)

        def rank_for(pair: tuple[str, EmbeddingVector]) -> list[RankedPassage]:
            text, vec = pair
            hits = top_k(self.index, vec, self.config.n_retrieve)
            pool = [self.passages[h.passage_id] for h in hits]
            return rerank(pool, text, ASSUMPTION_INSTRUCTION, self.backends.rerank)

        pairs = list(zip(inferences, inference_vecs))
        start = time.monotonic()
        try:
            if jobs > 1 and k > 1:
                with ThreadPoolExecutor(max_workers=min(jobs, k)) as pool:
                    ranked_lists = list(pool.map(rank_for, pairs))
            else:
                ranked_lists = [rank_for(pair) for pair in pairs]
        except _BACKEND_ERRORS as exc:
            raise StageFailure("rerank", exc) from exc
        timer.timing_ms["rerank"] = timer.timing_ms.get("rerank", 0) + int(
            (time.monotonic() - start) * 1000)

        used = {p.id for p in reading}
        for text, ranked in zip(inferences, ranked_lists):
            chosen = next((rp.passage for rp in ranked if rp.passage.id not in used), None)
            if chosen is None:
                raise CorpusExhausted(
                    f"no non-duplicate passage left for inference {text!r}"
                )
            used.add(chosen.id)
            reading.append(chosen)

        prompt = build_reader_prompt("augmented", reading, question, inferences,
                                     self.config.max_context_tokens)
        answer = "" if dry_run else self._read(timer, prompt)
        return AnswerBundle(
            question=question, mode="augmented", k=k, inferences_used=inferences,
            reading_set=reading, prompt_text=prompt, answer_text=answer,
            exemplar_seed=exemplar_seed,
            backend_ids=self._backend_ids(generated=exemplar_seed is not None),
            timing_ms=timer.timing_ms, question_id=question_id,
        )

    def generate_question_inferences(self, question: str,
                                     seed: int | None = None) -> tuple[list[str], int]:
        """Generate inferences with the engine's exemplars; returns (inferences, seed used)."""
        if self.backends.generate is None:
            raise ValueError("engine has no generation backend configured")
        exemplars = self.exemplars or default_exemplars()
        used_seed = self.exemplar_seed if seed is None else seed
        try:
            inferences = generate_inferences(
                question, exemplars.shuffled(used_seed), self.backends.generate)
        except _BACKEND_ERRORS as exc:
            raise StageFailure("generate", exc) from exc
        return inferences, used_seed

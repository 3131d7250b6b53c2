"""Instruction-conditioned second-stage ranking of a retrieval pool."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

from . import prompts
from .corpus import Passage
from .errors import EmptyPool, MalformedResponse


@dataclass(frozen=True)
class RerankInstruction:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("instruction text must be non-empty")


# The two built-in instructions: one for ranking against the user question,
# one for ranking against a single assumption to be verified.
QUESTION_INSTRUCTION = RerankInstruction(prompts.RERANK_QUESTION_INSTRUCTION)
ASSUMPTION_INSTRUCTION = RerankInstruction(prompts.RERANK_ASSUMPTION_INSTRUCTION)


@dataclass(frozen=True)
class RankedPassage:
    passage: Passage
    retrieval_rank: int
    rerank_score: float


class RerankBackend(Protocol):
    model_id: str

    def rerank_score(self, instruction: str, query: str, candidates: list[str]) -> list[float]: ...


def rerank(pool: list[Passage], query: str, instruction: RerankInstruction,
           backend: RerankBackend) -> list[RankedPassage]:
    """Score the pool under the instruction and sort best-first.

    Ties break by the original retrieval rank (ascending), so the first-stage
    ordering survives where the reranker is indifferent. Score scale is
    backend-defined; only the ordering is meaningful.
    """
    if not pool:
        raise EmptyPool("rerank called with an empty pool")
    scores = backend.rerank_score(instruction.text, query, [p.text for p in pool])
    if len(scores) != len(pool) or any(not math.isfinite(s) for s in scores):
        raise MalformedResponse("reranker must return one finite score per candidate")
    ranked = [
        RankedPassage(passage=p, retrieval_rank=rank, rerank_score=float(score))
        for rank, (p, score) in enumerate(zip(pool, scores))
    ]
    ranked.sort(key=lambda rp: (-rp.rerank_score, rp.retrieval_rank))
    return ranked


def top_n(ranked: list[RankedPassage], n: int) -> list[RankedPassage]:
    if n < 1:
        raise ValueError("n must be >= 1")
    return ranked[:n]

"""Generating, consolidating, parsing, and coverage-matching assumption lists.

An inference here is a short declarative sentence stating something the asker
of a question appears to believe. Generation is few-shot: a fixed instruction,
a set of exemplar question -> INFERENCES blocks (shuffled once per run with a
recorded seed), then the target question.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Protocol

import numpy as np

from . import prompts
from .backends import CompletionRequest, EmbeddingVector
from .errors import ParseError

VERACITY_VALUES = frozenset({"true", "false", "subjective", "unknown"})
ITYPE_VALUES = frozenset({"presupposition", "implicature", "unlabeled"})


@dataclass(frozen=True)
class Evidence:
    url: str
    passage_text: str


@dataclass
class PragmaticInference:
    """An assumption/implication of a question, with its expert labels."""

    id: str
    question_id: str
    text: str
    veracity: str = "unknown"
    itype: str = "unlabeled"
    plausibility: list[int] = field(default_factory=list)
    addressed: bool | None = None
    evidence: Evidence | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("inference text must be non-empty")
        if self.veracity not in VERACITY_VALUES:
            raise ValueError(f"invalid veracity {self.veracity!r}")
        if self.itype not in ITYPE_VALUES:
            raise ValueError(f"invalid itype {self.itype!r}")
        for rating in self.plausibility:
            if not (1 <= rating <= 5):
                raise ValueError(f"plausibility rating {rating} outside 1..5")


@dataclass(frozen=True)
class ExemplarSet:
    """Few-shot (question, inferences) pairs for the generation prompt."""

    items: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("exemplar set must be non-empty")

    @property
    def n_inferences(self) -> int:
        return sum(len(infs) for _, infs in self.items)

    def shuffled(self, seed: int) -> "ExemplarSet":
        """Return a copy with items shuffled by ``random.Random(seed)``."""
        items = list(self.items)
        random.Random(seed).shuffle(items)
        return ExemplarSet(items=tuple(items))


def default_exemplars() -> ExemplarSet:
    """The shipped exemplar set: 7 questions, 37 inferences in total.

    These are replaceable fixture data; swap in your own via the exemplar
    file interface (line-delimited {"question", "inferences"} records).
    """
    text = resources.files("pragqa.data").joinpath("exemplars.jsonl").read_text("utf-8")
    return _exemplars_from_lines(text.splitlines())


def load_exemplars(path: str) -> ExemplarSet:
    with open(path, encoding="utf-8") as fh:
        return _exemplars_from_lines(fh.read().splitlines())


def _exemplars_from_lines(lines: list[str]) -> ExemplarSet:
    items = []
    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        items.append((record["question"], tuple(record["inferences"])))
    return ExemplarSet(items=tuple(items))


class CompletionBackend(Protocol):
    model_id: str

    def complete(self, req: CompletionRequest) -> str: ...


def _bullets(items: list[str]) -> str:
    return "\n".join(f"- {item}" for item in items)


def build_generation_prompt(question: str, exemplars: ExemplarSet) -> str:
    """Instruction, then each exemplar as a question -> INFERENCES block, then the target."""
    if not question:
        raise ValueError("question must be non-empty")
    blocks = [prompts.INFERENCE_GENERATION_PROMPT]
    for ex_question, ex_inferences in exemplars.items:
        blocks.append(f"Question: {ex_question}\nINFERENCES:\n{_bullets(list(ex_inferences))}")
    blocks.append(f"Question: {question}\nINFERENCES:")
    return "\n\n".join(blocks)


def generate_inferences(question: str, exemplars: ExemplarSet,
                        backend: CompletionBackend) -> list[str]:
    """Generate the inference list for ``question``.

    The number of inferences is whatever the model produces; callers wanting
    a reproducible exemplar order pass ``exemplars.shuffled(seed)``.
    """
    prompt = build_generation_prompt(question, exemplars)
    raw = backend.complete(CompletionRequest(prompt=prompt))
    return parse_inference_list(raw)


def build_consolidation_prompt(question: str, assumptions: list[str],
                               subquestions: list[str]) -> str:
    return (
        f"{prompts.CONSOLIDATION_PROMPT}\n\n"
        f"QUESTION: {question}\n"
        f"ASSUMPTIONS:\n{_bullets(assumptions)}\n"
        f"SUBQUESTIONS:\n{_bullets(subquestions)}"
    )


def consolidate(question: str, assumptions: list[str], subquestions: list[str],
                backend: CompletionBackend) -> list[str]:
    """Merge annotator assumptions and subquestions into one deduplicated list."""
    if not assumptions and not subquestions:
        raise ValueError("need at least one assumption or subquestion")
    prompt = build_consolidation_prompt(question, assumptions, subquestions)
    raw = backend.complete(CompletionRequest(prompt=prompt))
    return parse_inference_list(raw)


_HEADING_RE = re.compile(r"^\s*inferences\s*:?\s*$", re.IGNORECASE)
_ITEM_RE = re.compile(r"^\s*(?:[-*]|\d+\.)\s*(.*)$")


def _dedup_key(text: str) -> str:
    return " ".join(text.split()).lower()


def parse_inference_list(raw: str) -> list[str]:
    """Extract list items following the last ``INFERENCES`` heading.

    Items are lines starting with "-", "*", or "<digits>."; markers and
    surrounding whitespace are trimmed, empties dropped, and duplicates
    removed case-insensitively keeping the first occurrence. Without a
    heading, the whole text is scanned.
    """
    lines = raw.splitlines()
    start = 0
    for i, line in enumerate(lines):
        if _HEADING_RE.match(line):
            start = i + 1
    items: list[str] = []
    seen: set[str] = set()
    for line in lines[start:]:
        match = _ITEM_RE.match(line)
        if not match:
            continue
        text = match.group(1).strip()
        if not text:
            continue
        key = _dedup_key(text)
        if key in seen:
            continue
        seen.add(key)
        items.append(text)
    if not items:
        raise ParseError("no INFERENCES list items found in completion")
    return items


@dataclass(frozen=True)
class CoverageResult:
    covered: list[bool]
    coverage: float


EmbedFn = Callable[[list[str]], list[EmbeddingVector]]


def match_coverage(human: list[str], generated: list[str], embed_fn: EmbedFn,
                   tau: float = 0.8) -> CoverageResult:
    """Embedding-cosine proxy for "is each human inference covered by some generated one".

    human[i] counts as covered when its best cosine against the generated set
    reaches ``tau``. An empty generated set covers nothing.
    """
    if not human:
        raise ValueError("human inferences must be non-empty")
    if not generated:
        return CoverageResult(covered=[False] * len(human), coverage=0.0)
    vectors = embed_fn(list(human) + list(generated))
    matrix = np.asarray([v.values for v in vectors], dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("zero embedding vector")
    matrix = matrix / norms
    human_m = matrix[: len(human)]
    generated_m = matrix[len(human):]
    best = (human_m @ generated_m.T).max(axis=1)
    covered = [bool(b >= tau) for b in best]
    return CoverageResult(covered=covered, coverage=sum(covered) / len(human))

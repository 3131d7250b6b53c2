"""Deterministic in-process stand-ins for the three backend capabilities.

The stubs make the whole system runnable and testable offline: embeddings are
seeded unit vectors, rerank scores are token-overlap counts, and completions
are canned replies routed by a marker substring of the prompt.
"""

from __future__ import annotations

import hashlib
import threading
import time

import numpy as np

from .backends import CompletionRequest, EmbeddingVector, check_texts

# Canned completions, keyed by a substring that identifies which built-in
# prompt is being answered. Order matters: the first matching marker wins, so
# the assumption-addressing reader marker must precede the generic reader one.
CANNED_COMPLETIONS: dict[str, str] = {
    "list titled INFERENCES": (
        "INFERENCES:\n"
        "- The asker assumes the situation described in the question is common.\n"
        "- The asker believes acting on the answer is safe for their child."
    ),
    "consolidate the SUBQUESTIONS and ASSUMPTIONS": (
        "INFERENCES:\n"
        "- The asker assumes the situation described in the question is common.\n"
        "- The asker believes acting on the answer is safe for their child."
    ),
    'answer with "medical"': "medical",
    "rewrite the TITLE into a REWRITE": "",
    "must address assumptions made by the asker": (
        "Based on the verified sources, here is a complete answer that also "
        "addresses each assumption listed."
    ),
    "respond to the following question": (
        "Based on the verified sources, here is a complete answer."
    ),
}

DEFAULT_COMPLETION = "I do not have enough verified information to answer that."


def stub_embed(text: str, dim: int) -> EmbeddingVector:
    """Deterministic pseudo-random unit vector for ``text``.

    The seed is a stable 64-bit hash of the normalized text (lowercased,
    whitespace runs collapsed), so equal texts always map to bitwise-equal
    vectors across processes and platforms.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    normalized = " ".join(text.lower().split())
    digest = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).digest()
    seed = int.from_bytes(digest, "big")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(dim)
    norm = float(np.linalg.norm(raw))
    if norm == 0.0:  # unreachable for gaussian draws, kept for safety
        raw[0] = 1.0
        norm = 1.0
    unit = raw / norm
    return EmbeddingVector(values=tuple(float(v) for v in unit), dim=dim)


class StubEmbedding:
    """Offline embedding backend built on :func:`stub_embed`."""

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.model_id = f"stub-embed-{dim}"

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        check_texts(texts)
        return [stub_embed(t, self.dim) for t in texts]

    def reachable(self) -> bool:
        return True


class StubCompletion:
    """Offline completion backend.

    Contract: if the prompt contains a line ``ECHO:<x>`` the reply is ``<x>``;
    otherwise the first canned entry whose marker substring occurs in the
    prompt wins; otherwise ``default``. Prompts are recorded in ``self.calls``
    so tests can assert the exact prompt -> answer flow.
    """

    def __init__(self, canned: dict[str, str] | None = None,
                 default: str = DEFAULT_COMPLETION,
                 model_id: str = "stub-complete",
                 delay_s: float = 0.0):
        self.canned = dict(CANNED_COMPLETIONS) if canned is None else dict(canned)
        self.default = default
        self.model_id = model_id
        self.delay_s = delay_s
        self.calls: list[str] = []
        self._lock = threading.Lock()

    def complete(self, req: CompletionRequest) -> str:
        with self._lock:
            self.calls.append(req.prompt)
        if self.delay_s:
            time.sleep(self.delay_s)
        for line in req.prompt.splitlines():
            stripped = line.strip()
            if stripped.startswith("ECHO:"):
                return stripped[len("ECHO:"):].strip()
        for marker, reply in self.canned.items():
            if marker in req.prompt:
                return reply.strip()
        return self.default.strip()

    def reachable(self) -> bool:
        return True


class StubRerank:
    """Offline reranker: score = count of query tokens present in the candidate.

    Tokenization is lowercased whitespace splitting; each query token
    occurrence contributes 1 when it appears anywhere in the candidate.
    """

    model_id = "stub-rerank"

    def rerank_score(self, instruction: str, query: str, candidates: list[str]) -> list[float]:
        if not instruction:
            raise ValueError("instruction must be non-empty")
        if not candidates:
            raise ValueError("candidates must be non-empty")
        query_tokens = query.lower().split()
        scores = []
        for candidate in candidates:
            present = set(candidate.lower().split())
            scores.append(float(sum(1 for t in query_tokens if t in present)))
        return scores

    def reachable(self) -> bool:
        return True

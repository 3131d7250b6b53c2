"""HTTP clients for the three external model capabilities.

Every deployment-facing call goes through one of three capability clients:
text completion, text embedding, and instruction-conditioned rerank scoring.
All three share the same wire conventions (JSON bodies, bearer credential
read from an environment variable, bounded in-flight requests, exponential
backoff on transient failures). Offline doubles with the same call surface
live in :mod:`pragqa.stubs`.
"""

from __future__ import annotations

import logging
import math
import os
import random
import threading
import time
from dataclasses import dataclass

import requests

from .errors import DimensionMismatch, MalformedResponse, NetworkError, RateLimited

log = logging.getLogger(__name__)

DEFAULT_BACKOFF_MS = 500


@dataclass(frozen=True)
class BackendConfig:
    """Connection settings for one remote capability endpoint."""

    endpoint: str
    model_id: str
    timeout_ms: int = 30_000
    max_retries: int = 2
    credential_env: str = ""
    rate_limit: int = 8

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.rate_limit < 1:
            raise ValueError("rate_limit must be >= 1")


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = 0.0
    max_output_tokens: int = 512
    stop_sequences: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be > 0")
        object.__setattr__(self, "stop_sequences", tuple(self.stop_sequences))


@dataclass(frozen=True)
class EmbeddingVector:
    """A fixed-length vector of finite reals."""

    values: tuple[float, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.dim <= 0:
            raise ValueError("dim must be > 0")
        if len(self.values) != self.dim:
            raise ValueError(f"expected {self.dim} values, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding contains non-finite values")


def check_texts(texts: list[str]) -> None:
    """Shared embed precondition: a non-empty batch of non-empty strings."""
    if not texts:
        raise ValueError("texts must be non-empty")
    if any(not t for t in texts):
        raise ValueError("texts must not contain empty strings")


def vectors_from_rows(rows: list[list[float]]) -> list[EmbeddingVector]:
    """Validate that all rows share one dimension and wrap them."""
    dims = {len(r) for r in rows}
    if len(dims) != 1:
        raise DimensionMismatch(f"vectors of unequal length in one response: {sorted(dims)}")
    dim = dims.pop()
    if dim == 0:
        raise MalformedResponse("backend returned zero-length embeddings")
    return [EmbeddingVector(values=tuple(r), dim=dim) for r in rows]


class _HttpClient:
    """Shared POST-with-retries transport.

    Retries transient failures (connection errors, 429, 5xx) up to
    ``max_retries`` times with exponential backoff starting at ``backoff_ms``
    (doubling, +/-20% jitter). In-flight calls are bounded by an admission
    semaphore of size ``rate_limit``; handles are immutable after
    construction and safe to share across threads.
    """

    def __init__(self, config: BackendConfig, *, backoff_ms: int = DEFAULT_BACKOFF_MS,
                 session: requests.Session | None = None):
        self.config = config
        self._backoff_ms = backoff_ms
        self._gate = threading.BoundedSemaphore(config.rate_limit)
        self._session = session or requests.Session()

    @property
    def model_id(self) -> str:
        return self.config.model_id

    def reachable(self) -> bool:
        try:
            self._session.get(self.config.endpoint, timeout=2)
            return True
        except requests.RequestException:
            return False

    def _credential(self) -> str:
        if not self.config.credential_env:
            return ""
        return os.environ.get(self.config.credential_env, "")

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        secret = self._credential()
        if secret:
            headers["Authorization"] = f"Bearer {secret}"
        return headers

    def _post(self, payload: dict) -> dict:
        cfg = self.config
        attempts = cfg.max_retries + 1
        delay_s = self._backoff_ms / 1000.0
        last_kind = "network"
        last_detail = ""
        with self._gate:
            for attempt in range(attempts):
                if attempt:
                    time.sleep(delay_s * random.uniform(0.8, 1.2))
                    delay_s *= 2
                # never log the credential itself, only whether one is attached
                log.debug(
                    "POST %s model=%s attempt=%d auth=%s",
                    cfg.endpoint, cfg.model_id, attempt + 1,
                    "***" if self._credential() else "none",
                )
                try:
                    resp = self._session.post(
                        cfg.endpoint, json=payload, headers=self._headers(),
                        timeout=cfg.timeout_ms / 1000.0,
                    )
                except requests.RequestException as exc:
                    last_kind, last_detail = "network", str(exc)
                    continue
                if resp.status_code == 429:
                    last_kind, last_detail = "rate", f"HTTP 429: {resp.text[:200]}"
                    continue
                if resp.status_code >= 500:
                    last_kind, last_detail = "network", f"HTTP {resp.status_code}"
                    continue
                if resp.status_code >= 400:
                    raise MalformedResponse(
                        f"{cfg.endpoint} rejected request: HTTP {resp.status_code}: {resp.text[:200]}"
                    )
                try:
                    return resp.json()
                except ValueError as exc:
                    raise MalformedResponse(f"non-JSON response from {cfg.endpoint}") from exc
        if last_kind == "rate":
            raise RateLimited(f"{cfg.endpoint} still rate-limiting after {attempts} attempts")
        raise NetworkError(
            f"{cfg.endpoint} unreachable after {attempts} attempts ({last_detail})"
        )


class HttpCompletion(_HttpClient):
    """Text completion over a chat/completions-style JSON contract."""

    def complete(self, req: CompletionRequest) -> str:
        payload: dict = {
            "model": self.config.model_id,
            "prompt": req.prompt,
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        }
        if req.stop_sequences:
            payload["stop"] = list(req.stop_sequences)
        data = self._post(payload)
        text = _extract_completion_text(data)
        if text is None:
            raise MalformedResponse("completion response carries no text field")
        return text.strip()


def _extract_completion_text(data: dict) -> str | None:
    # accept both the legacy {"choices":[{"text": ...}]} and the chat
    # {"choices":[{"message":{"content": ...}}]} shapes, plus a bare {"text": ...}
    if isinstance(data.get("text"), str):
        return data["text"]
    choices = data.get("choices")
    if isinstance(choices, list) and choices:
        first = choices[0]
        if isinstance(first, dict):
            if isinstance(first.get("text"), str):
                return first["text"]
            message = first.get("message")
            if isinstance(message, dict) and isinstance(message.get("content"), str):
                return message["content"]
    return None


class HttpEmbedding(_HttpClient):
    """Text embedding client; one request embeds a whole batch."""

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        check_texts(texts)
        data = self._post({"model": self.config.model_id, "input": list(texts)})
        rows = _extract_embedding_rows(data)
        if rows is None:
            raise MalformedResponse("embedding response carries no vectors")
        if len(rows) != len(texts):
            raise MalformedResponse(
                f"asked for {len(texts)} embeddings, got {len(rows)}"
            )
        return vectors_from_rows(rows)


def _extract_embedding_rows(data: dict) -> list[list[float]] | None:
    if isinstance(data.get("embeddings"), list):
        return data["embeddings"]
    entries = data.get("data")
    if isinstance(entries, list):
        rows = []
        for entry in entries:
            if not (isinstance(entry, dict) and isinstance(entry.get("embedding"), list)):
                return None
            rows.append(entry["embedding"])
        return rows
    return None


class HttpRerank(_HttpClient):
    """Instruction-conditioned rerank scoring client.

    The instruction and the query travel as distinct fields; how they are
    combined (separator tokens etc.) is the serving side's concern.
    """

    def rerank_score(self, instruction: str, query: str, candidates: list[str]) -> list[float]:
        if not instruction:
            raise ValueError("instruction must be non-empty")
        if not candidates:
            raise ValueError("candidates must be non-empty")
        data = self._post({
            "model": self.config.model_id,
            "instruction": instruction,
            "query": query,
            "candidates": list(candidates),
        })
        scores = data.get("scores")
        if not isinstance(scores, list) or len(scores) != len(candidates):
            raise MalformedResponse("rerank response carries no per-candidate scores")
        out = []
        for s in scores:
            if not isinstance(s, (int, float)) or not math.isfinite(float(s)):
                raise MalformedResponse(f"non-finite rerank score: {s!r}")
            out.append(float(s))
        return out

"""Exact cosine search over embedded passages.

The index is brute force on purpose: vectors are unit-normalized at insert
so cosine similarity reduces to a dot product, search is an exact full scan,
and ties are broken by passage id ascending so results are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .backends import EmbeddingVector
from .corpus import Passage
from .errors import CorruptRecord, DimensionMismatch, IoError

EmbedFn = Callable[[list[str]], list[EmbeddingVector]]

_NORM_TOL = 1e-6


@dataclass(frozen=True)
class RetrievalHit:
    passage_id: str
    score: float


@dataclass
class VectorIndex:
    """Unit-normalized embedding matrix plus the aligned passage ids."""

    dim: int
    ids: list[str]
    matrix: np.ndarray  # shape (n, dim), float64, unit rows

    def __post_init__(self):
        if len(self.ids) != self.matrix.shape[0]:
            raise ValueError("ids and matrix disagree on entry count")
        if self.matrix.shape[1] != self.dim:
            raise DimensionMismatch(
                f"matrix dim {self.matrix.shape[1]} != declared dim {self.dim}"
            )
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("passage ids must be unique")
        norms = np.linalg.norm(self.matrix, axis=1)
        if norms.size and float(np.max(np.abs(norms - 1.0))) > _NORM_TOL:
            raise ValueError("index vectors must be unit-normalized")

    @property
    def size(self) -> int:
        return len(self.ids)

    def entries(self) -> Iterable[tuple[str, EmbeddingVector]]:
        for pid, row in zip(self.ids, self.matrix):
            yield pid, EmbeddingVector(values=tuple(float(v) for v in row), dim=self.dim)


def _batched(items: Sequence[str], batch_size: int) -> Iterable[Sequence[str]]:
    for start in range(0, len(items), batch_size):
        yield items[start:start + batch_size]


def _embed_matrix(texts: list[str], embed_fn: EmbedFn, batch_size: int) -> np.ndarray:
    rows: list[tuple[float, ...]] = []
    dim: int | None = None
    for batch in _batched(texts, batch_size):
        vectors = embed_fn(list(batch))
        if len(vectors) != len(batch):
            raise DimensionMismatch(
                f"embed returned {len(vectors)} vectors for {len(batch)} texts"
            )
        for vec in vectors:
            if dim is None:
                dim = vec.dim
            elif vec.dim != dim:
                raise DimensionMismatch(f"mixed dims {dim} and {vec.dim} in one build")
            rows.append(vec.values)
    matrix = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("cannot index a zero embedding vector")
    return matrix / norms


def build_index(passages: list[Passage], embed_fn: EmbedFn, batch_size: int = 64) -> VectorIndex:
    """Embed every passage (in batches) and build the unit-normalized index."""
    if not passages:
        raise ValueError("passages must be non-empty")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    ids = [p.id for p in passages]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate passage ids in corpus")
    matrix = _embed_matrix([p.text for p in passages], embed_fn, batch_size)
    return VectorIndex(dim=matrix.shape[1], ids=ids, matrix=matrix)


def top_k(index: VectorIndex, query_vec: EmbeddingVector, k: int) -> list[RetrievalHit]:
    """Exact top-k by cosine, descending; ties broken by passage id ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if query_vec.dim != index.dim:
        raise DimensionMismatch(f"query dim {query_vec.dim} != index dim {index.dim}")
    q = np.asarray(query_vec.values, dtype=np.float64)
    norm = float(np.linalg.norm(q))
    if norm == 0.0:
        raise ValueError("query vector has zero norm")
    scores = index.matrix @ (q / norm)
    scores = np.clip(scores, -1.0, 1.0)
    order = sorted(range(index.size), key=lambda i: (-scores[i], index.ids[i]))
    return [RetrievalHit(passage_id=index.ids[i], score=float(scores[i])) for i in order[:k]]


def nearest_neighbor_select(seed_texts: list[str], pool_texts: list[str],
                            embed_fn: EmbedFn, k_per_seed: int = 100,
                            batch_size: int = 64) -> set[int]:
    """Union over seeds of each seed's k nearest pool items under cosine.

    Returns deduplicated pool indices. Ties at the k boundary resolve by
    pool index ascending.
    """
    if not seed_texts or not pool_texts:
        raise ValueError("seed_texts and pool_texts must be non-empty")
    if k_per_seed < 1:
        raise ValueError("k_per_seed must be >= 1")
    pool = _embed_matrix(list(pool_texts), embed_fn, batch_size)
    seeds = _embed_matrix(list(seed_texts), embed_fn, batch_size)
    if pool.shape[1] != seeds.shape[1]:
        raise DimensionMismatch("seed and pool embeddings disagree on dim")
    selected: set[int] = set()
    k = min(k_per_seed, len(pool_texts))
    for seed_vec in seeds:
        sims = pool @ seed_vec
        order = sorted(range(len(pool_texts)), key=lambda i: (-sims[i], i))
        selected.update(order[:k])
    return selected


def save_index(index: VectorIndex, path: str) -> None:
    """Persist as line-delimited JSON: a header line, then one entry per line.

    JSON float serialization uses shortest round-trip decimals, so vectors
    reload bit-for-bit.
    """
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"kind": "vector-index", "dim": index.dim}) + "\n")
            for pid, row in zip(index.ids, index.matrix):
                fh.write(json.dumps({"id": pid, "vec": [float(v) for v in row]}) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_index(path: str) -> VectorIndex:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise CorruptRecord("empty index file", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        raise CorruptRecord("invalid JSON header", 1) from None
    if not (isinstance(header, dict) and header.get("kind") == "vector-index"
            and isinstance(header.get("dim"), int)):
        raise CorruptRecord("not a vector-index header", 1)
    dim = header["dim"]
    ids: list[str] = []
    rows: list[list[float]] = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            raise CorruptRecord("invalid JSON", number) from None
        if not (isinstance(record, dict) and isinstance(record.get("id"), str)
                and isinstance(record.get("vec"), list)):
            raise CorruptRecord("entry needs 'id' and 'vec'", number)
        if len(record["vec"]) != dim:
            raise CorruptRecord(f"vector length {len(record['vec'])} != dim {dim}", number)
        ids.append(record["id"])
        rows.append([float(v) for v in record["vec"]])
    if not ids:
        raise CorruptRecord("index has no entries", 2)
    return VectorIndex(dim=dim, ids=ids, matrix=np.asarray(rows, dtype=np.float64))

"""Document ingestion: fixed-size passage chunking and the passage store.

A token is a whitespace-delimited unit. Documents are split into consecutive,
non-overlapping windows of ``chunk_size`` tokens; the final remainder window
is kept, so concatenating the passages' token lists reproduces the document's
token list exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .errors import CorruptRecord, EmptyDocument, IoError


@dataclass(frozen=True)
class Document:
    id: str
    url: str
    source_tag: str
    title: str
    text: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not self.text:
            raise ValueError("document text must be non-empty")


@dataclass(frozen=True)
class Passage:
    """A chunk of a source document; the retrieval unit."""

    id: str
    doc_id: str
    seq_index: int
    text: str
    token_count: int

    def __post_init__(self):
        if self.seq_index < 0:
            raise ValueError("seq_index must be >= 0")
        if self.token_count < 1:
            raise ValueError("token_count must be >= 1")


def tokenize_ws(text: str) -> list[str]:
    """Split on runs of Unicode whitespace; never yields empty tokens."""
    return text.split()


def chunk_document(doc: Document, chunk_size: int = 100) -> list[Passage]:
    """Chunk ``doc`` into passages of ``chunk_size`` tokens.

    Passage text is the window's tokens rejoined with single spaces (the
    canonical form; original intra-chunk whitespace is not preserved). The
    remainder window of 1..chunk_size-1 tokens is kept whole.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    tokens = tokenize_ws(doc.text)
    if not tokens:
        raise EmptyDocument(f"document {doc.id!r} tokenizes to zero tokens")
    passages = []
    for seq, start in enumerate(range(0, len(tokens), chunk_size)):
        window = tokens[start:start + chunk_size]
        passages.append(Passage(
            id=f"{doc.id}:{seq}",
            doc_id=doc.id,
            seq_index=seq,
            text=" ".join(window),
            token_count=len(window),
        ))
    return passages


_PASSAGE_FIELDS = {"id": str, "doc_id": str, "seq_index": int, "text": str, "token_count": int}
_DOCUMENT_FIELDS = {"id": str, "url": str, "source_tag": str, "title": str, "text": str}


def _dump_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


def _parse_line(line: str, fields: dict[str, type], line_number: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"invalid JSON ({exc.msg})", line_number) from None
    if not isinstance(record, dict):
        raise CorruptRecord("record is not an object", line_number)
    for name, typ in fields.items():
        if name not in record:
            raise CorruptRecord(f"missing field {name!r}", line_number)
        value = record[name]
        if not isinstance(value, typ) or (typ is int and isinstance(value, bool)):
            raise CorruptRecord(f"field {name!r} has wrong type", line_number)
    extra = set(record) - set(fields)
    if extra:
        raise CorruptRecord(f"unknown fields {sorted(extra)}", line_number)
    return record


def save_store(passages: list[Passage], path: str) -> None:
    """Write passages as line-delimited JSON records (UTF-8)."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for p in passages:
                fh.write(_dump_line(asdict(p)) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_store(path: str) -> list[Passage]:
    """Load a passage store; each bad line raises CorruptRecord with its number."""
    passages = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = _parse_line(line, _PASSAGE_FIELDS, number)
        if record["token_count"] != len(record["text"].split()):
            raise CorruptRecord("token_count does not match text", number)
        try:
            passages.append(Passage(**record))
        except ValueError as exc:
            raise CorruptRecord(str(exc), number) from None
    return passages


def save_documents(documents: list[Document], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for d in documents:
                fh.write(_dump_line(asdict(d)) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_documents(path: str) -> list[Document]:
    documents = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = _parse_line(line, _DOCUMENT_FIELDS, number)
        try:
            documents.append(Document(**record))
        except ValueError as exc:
            raise CorruptRecord(str(exc), number) from None
    return documents

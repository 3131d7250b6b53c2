"""pragqa: retrieval-augmented QA that surfaces and addresses the assumptions behind a question."""

__version__ = "0.1.0"

from .backends import BackendConfig, CompletionRequest, EmbeddingVector
from .corpus import Document, Passage, chunk_document, tokenize_ws
from .pipeline import AnswerBundle, Backends, PipelineConfig, QAEngine

__all__ = [
    "AnswerBundle",
    "BackendConfig",
    "Backends",
    "CompletionRequest",
    "Document",
    "EmbeddingVector",
    "Passage",
    "PipelineConfig",
    "QAEngine",
    "chunk_document",
    "tokenize_ws",
    "__version__",
]

"""Shared fixtures: a scriptable HTTP server and small stub-backed engines."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from pragqa.corpus import Document, chunk_document
from pragqa.pipeline import Backends, PipelineConfig, QAEngine
from pragqa.retrieval import build_index
from pragqa.stubs import StubCompletion, StubEmbedding, StubRerank


class ScriptedServer:
    """HTTP server that replays a scripted list of (status, body) responses.

    Each POST consumes the next script entry (the last entry repeats once the
    script is exhausted) and is recorded in ``requests`` for assertions.
    """

    def __init__(self):
        self.script: list[tuple[int, dict | str]] = []
        self.requests: list[dict] = []
        self._lock = threading.Lock()

        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                self.send_response(200)
                self.end_headers()
                self.wfile.write(b"{}")

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                with outer._lock:
                    try:
                        outer.requests.append(json.loads(raw))
                    except json.JSONDecodeError:
                        outer.requests.append({"raw": raw.decode("utf-8", "replace")})
                    idx = min(len(outer.requests) - 1, len(outer.script) - 1)
                    status, body = outer.script[idx] if outer.script else (500, "")
                payload = body if isinstance(body, str) else json.dumps(body)
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.end_headers()
                self.wfile.write(payload.encode("utf-8"))

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        self.url = f"http://127.0.0.1:{self._server.server_address[1]}/"

    def reset(self, script):
        with self._lock:
            self.script = list(script)
            self.requests = []

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture()
def scripted_server():
    server = ScriptedServer()
    yield server
    server.close()


def make_corpus(n_docs: int = 6, tokens_per_doc: int = 50, chunk_size: int = 10):
    """A tiny deterministic corpus with varied vocabulary per document."""
    vocabulary = [
        "fever infant hydration rest pediatrician dosage vaccine schedule sleep safety",
        "formula feeding bottle sterilize night hunger weight gain newborn latch",
        "pregnancy trimester ultrasound movement kicks heartbeat nutrition vitamins rest iron",
        "bath water temperature warm wrist elbow basin skin towel gentle",
        "car seat straps rear facing installation harness recall base buckle",
        "rash cream diaper sensitive skin barrier zinc changing wipes air",
    ]
    passages = []
    for d in range(n_docs):
        words = vocabulary[d % len(vocabulary)].split()
        text = " ".join(words[i % len(words)] + f"{d}t{i}" if i % 3 == 0 else words[i % len(words)]
                        for i in range(tokens_per_doc))
        doc = Document(id=f"doc{d}", url=f"https://example.org/{d}",
                       source_tag="fixture", title=f"Doc {d}", text=text)
        passages.extend(chunk_document(doc, chunk_size=chunk_size))
    return passages


def make_engine(passages=None, dim: int = 16, n_retrieve: int = 100,
                n_question_passages: int = 5, generate: bool = True,
                read_backend=None) -> QAEngine:
    passages = passages if passages is not None else make_corpus()
    embedder = StubEmbedding(dim=dim)
    index = build_index(passages, embedder.embed, batch_size=16)
    backends = Backends(
        embed=embedder,
        rerank=StubRerank(),
        read=read_backend or StubCompletion(),
        generate=StubCompletion(model_id="stub-generate") if generate else None,
    )
    return QAEngine(
        passages=passages, index=index, backends=backends,
        config=PipelineConfig(n_retrieve=n_retrieve, n_question_passages=n_question_passages),
    )


@pytest.fixture()
def small_engine():
    return make_engine()


# ------------------------------------------------------------- acceptance log

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")

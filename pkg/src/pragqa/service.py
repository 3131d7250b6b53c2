"""HTTP facade over the QA engine for interactive clients and scripts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FuturesTimeout
from dataclasses import asdict
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .errors import CorpusExhausted, StageFailure
from .pipeline import QAEngine


class AskRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    question: str
    mode: Literal["baseline", "augmented"] = "baseline"
    k: int | None = Field(default=None, ge=0)  # honored in baseline mode only
    inferences: list[str] | None = None  # augmented: generated server-side when absent


def create_app(engine: QAEngine, request_timeout_s: float = 120.0) -> FastAPI:
    """Build the service around one immutable engine.

    Requests are stateless: each /ask run touches only its own bundle, so
    concurrent requests never leak passages into each other.
    """
    app = FastAPI(title="pragqa", version="0.1.0")
    # the web client may be served from any static host
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    executor = ThreadPoolExecutor(max_workers=32)

    @app.exception_handler(RequestValidationError)
    async def bad_schema(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def _run_ask(req: AskRequest):
        if req.mode == "baseline":
            return engine.run_baseline(req.question, k=req.k or 0)
        if req.inferences is None:
            inferences, seed = engine.generate_question_inferences(req.question)
        else:
            inferences, seed = list(req.inferences), None
        return engine.run_augmented(req.question, inferences, exemplar_seed=seed)

    @app.post("/ask")
    def ask(req: AskRequest):
        if not req.question.strip():
            return JSONResponse(status_code=422, content={"detail": "question is empty"})
        future = executor.submit(_run_ask, req)
        try:
            bundle = future.result(timeout=request_timeout_s)
        except FuturesTimeout:
            return JSONResponse(status_code=504, content={"detail": "pipeline timed out"})
        except StageFailure as exc:
            return JSONResponse(
                status_code=503,
                content={"detail": str(exc), "stage": exc.stage},
            )
        except CorpusExhausted as exc:
            return JSONResponse(
                status_code=503,
                content={"detail": str(exc), "stage": "corpus"},
            )
        return bundle.to_dict()

    @app.get("/health")
    def health():
        backends = {
            "embed": engine.backends.embed.reachable(),
            "rerank": engine.backends.rerank.reachable(),
            "read": engine.backends.read.reachable(),
        }
        if engine.backends.generate is not None:
            backends["generate"] = engine.backends.generate.reachable()
        return {"status": "ok", "index_size": engine.index_size, "backends": backends}

    @app.get("/passages/{passage_id}")
    def get_passage(passage_id: str):
        passage = engine.passage(passage_id)
        if passage is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown passage {passage_id!r}"})
        return asdict(passage)

    return app

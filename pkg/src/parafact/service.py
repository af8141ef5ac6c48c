"""HTTP front for the workbench: JSON API under /api/v1.

Error bodies are always ``{"code": ..., "message": ...}`` with 404 for
unknown ids, 409 for closed rounds or empty promotions, 422 for invalid
payloads.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import acquisition
from .acquisition import SeedPattern
from .workbench import (
    Candidate,
    ClosedRoundError,
    MissingResourcesError,
    NoAcceptedRowsError,
    UnknownIdError,
    Workbench,
)

DEFAULT_LISTEN = "127.0.0.1:8737"
DEFAULT_DATA_DIR = "./data"


class SeedIn(BaseModel):
    head: str = Field(min_length=1)
    expansion: str = Field(min_length=1)
    etq: str = Field(min_length=1)
    objet: str = "$2"


class RoundIn(BaseModel):
    seeds: list[SeedIn] = Field(min_length=1)
    threshold: float = Field(gt=-1e-9)


class DecisionIn(BaseModel):
    candidate_id: str
    verdict: str
    annotator: str = "anonymous"


def _candidate_json(c: Candidate) -> dict:
    return {
        "id": c.id,
        "round": c.round_id,
        "schema": c.row.schema,
        "elt1": c.row.elt1,
        "cat1": c.row.cat1,
        "elt2": c.row.elt2,
        "cat2": c.row.cat2,
        "score": c.row.score,
        "etq": c.row.etq,
        "objet": c.row.objet,
        "status": c.status,
    }


def _round_json(wb: Workbench, round_id: int) -> dict:
    rnd = wb.round(round_id)
    stats = wb.stats(round_id)
    return {
        "id": rnd.id,
        "seeds": [s.__dict__ for s in rnd.seeds],
        "threshold": rnd.threshold,
        "created_at": rnd.created_at,
        "stats": {
            "proposed": stats.proposed,
            "accepted": stats.accepted,
            "rejected": stats.rejected,
            "new_patterns_per_seed": stats.new_patterns_per_seed,
            "acceptance_rate": stats.acceptance_rate,
        },
    }


def create_app(workbench: Workbench, frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="parafact workbench", docs_url=None, redoc_url=None)

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(RequestValidationError)
    async def on_validation(_request: Request, exc: RequestValidationError):
        return error(422, "validation", str(exc.errors()[:1]))

    @app.exception_handler(UnknownIdError)
    async def on_unknown(_request: Request, exc: UnknownIdError):
        return error(404, "not-found", f"unknown id: {exc.args[0]}")

    @app.exception_handler(ClosedRoundError)
    async def on_closed(_request: Request, exc: ClosedRoundError):
        return error(409, "closed-round", str(exc))

    @app.exception_handler(NoAcceptedRowsError)
    async def on_empty(_request: Request, exc: NoAcceptedRowsError):
        return error(409, "no-accepted-rows", str(exc))

    @app.exception_handler(MissingResourcesError)
    async def on_missing(_request: Request, exc: MissingResourcesError):
        return error(409, "missing-resources", str(exc))

    @app.exception_handler(ValueError)
    async def on_value(_request: Request, exc: ValueError):
        return error(422, "validation", str(exc))

    @app.post("/api/v1/rounds")
    def post_round(payload: RoundIn):
        seeds = [SeedPattern(s.head, s.expansion, s.etq, s.objet) for s in payload.seeds]
        rnd = workbench.start_round(seeds, payload.threshold)
        return _round_json(workbench, rnd.id)

    @app.get("/api/v1/rounds")
    def get_rounds():
        return [_round_json(workbench, r.id) for r in workbench.rounds()]

    @app.get("/api/v1/rounds/{round_id}")
    def get_round(round_id: int):
        return _round_json(workbench, round_id)

    @app.get("/api/v1/candidates")
    def get_candidates(status: str | None = None, round: int | None = None):
        return [_candidate_json(c) for c in workbench.candidates(status, round)]

    @app.get("/api/v1/candidates/{candidate_id}/concordance")
    def get_concordance(candidate_id: str, k: int = 10):
        snippets = workbench.concordance(candidate_id, k)
        return [
            {
                "doc": s.doc_id,
                "sentence": s.sentence,
                "head_index": s.head_index,
                "exp_index": s.exp_index,
                "tokens": list(s.tokens),
            }
            for s in snippets
        ]

    @app.post("/api/v1/decisions")
    def post_decision(payload: DecisionIn):
        cand = workbench.record_decision(payload.candidate_id, payload.verdict, payload.annotator)
        return _candidate_json(cand)

    @app.post("/api/v1/rounds/{round_id}/promote")
    def post_promote(round_id: int):
        table, seeds = workbench.promote_accepted(round_id)
        return {
            "table": [
                {
                    "id": r.row_id,
                    "schema": r.schema,
                    "elt1": r.elt1,
                    "cat1": r.cat1,
                    "elt2": r.elt2,
                    "cat2": r.cat2,
                    "score": r.score,
                    "etq": r.etq,
                    "objet": r.objet,
                    "status": r.status,
                }
                for r in table
            ],
            "seeds": [s.__dict__ for s in seeds],
        }

    @app.get("/api/v1/tables/accepted")
    def get_accepted_table():
        table = workbench.accepted_table()
        return Response(
            content=acquisition.format_table(table),
            media_type="text/tab-separated-values; charset=utf-8",
        )

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app

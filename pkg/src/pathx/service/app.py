"""FastAPI application exposing the trial protocol.

Endpoints:
    POST /sessions                      create a session from demographics
    GET  /sessions/{id}                 state probe
    GET  /sessions/{id}/elicitation     stable shuffled 100-item list
    POST /sessions/{id}/profile         submit 10 items, get the bundle
    GET  /sessions/{id}/comparison      bundle + Likert questions
    POST /sessions/{id}/responses       submit the six answers
    GET  /export                        resolved rows + divergent-bar counts

Environment: PATHX_PORT, PATHX_DATA_DIR, PATHX_SEED (see ``config_from_env``).
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Header, Query
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..data import ColumnSchema
from .schemas import (
    ComparisonBundle,
    ComparisonEntry,
    CompletionReceipt,
    Demographics,
    ElicitationItem,
    ElicitationResponse,
    ExportPayload,
    ProfileSubmission,
    Question,
    ResponsesSubmission,
    SessionCreated,
    SessionStatus,
)
from .trial import TrialConfig, TrialError, TrialService


def config_from_env() -> TrialConfig:
    data_dir = Path(os.environ.get("PATHX_DATA_DIR", "trial_data"))
    dataset = os.environ.get("PATHX_DATASET")
    kg = os.environ.get("PATHX_KG")
    if not dataset or not kg:
        raise RuntimeError("PATHX_DATASET and PATHX_KG must point to the interaction and triple files")
    schema = ColumnSchema(
        user=os.environ.get("PATHX_COL_USER", "userId"),
        item=os.environ.get("PATHX_COL_ITEM", "movieId"),
        rating=os.environ.get("PATHX_COL_RATING", "rating"),
        timestamp=os.environ.get("PATHX_COL_TIMESTAMP", "timestamp"),
    )
    names = os.environ.get("PATHX_NAMES")
    return TrialConfig(
        dataset_path=Path(dataset),
        schema=schema,
        kg_path=Path(kg),
        data_dir=data_dir,
        seed=int(os.environ.get("PATHX_SEED", "0")),
        names_path=Path(names) if names else None,
    )


def create_app(service: TrialService | None = None, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="pathx trial service", version="0.1.0")
    if service is None:
        service = TrialService(config_from_env())
    app.state.service = service

    def trial() -> TrialService:
        return app.state.service

    @app.exception_handler(TrialError)
    async def trial_error_handler(_, exc: TrialError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.message})

    @app.post("/sessions", response_model=SessionCreated, status_code=201)
    def create_session(demographics: Demographics) -> SessionCreated:
        session_id = trial().create_session(demographics.model_dump())
        return SessionCreated(session_id=session_id)

    @app.get("/sessions/{session_id}", response_model=SessionStatus)
    def session_status(session_id: str) -> SessionStatus:
        return SessionStatus(session_id=session_id, state=trial().session_state(session_id))

    @app.get("/sessions/{session_id}/elicitation", response_model=ElicitationResponse)
    def elicitation(session_id: str) -> ElicitationResponse:
        items = trial().elicitation_for(session_id)
        return ElicitationResponse(
            session_id=session_id,
            items=[ElicitationItem(item=item, name=name) for item, name in items],
        )

    @app.post("/sessions/{session_id}/profile", response_model=ComparisonBundle)
    def submit_profile(session_id: str, submission: ProfileSubmission) -> ComparisonBundle:
        bundle = trial().submit_profile(session_id, submission.items)
        return ComparisonBundle(
            session_id=session_id,
            entries=[ComparisonEntry(**entry) for entry in bundle["entries"]],
            questions=[Question(**q) for q in trial().questions],
        )

    @app.get("/sessions/{session_id}/comparison", response_model=ComparisonBundle)
    def comparison(session_id: str) -> ComparisonBundle:
        payload = trial().comparison(session_id)
        return ComparisonBundle(
            session_id=session_id,
            entries=[ComparisonEntry(**entry) for entry in payload["entries"]],
            questions=[Question(**q) for q in payload["questions"]],
        )

    @app.post("/sessions/{session_id}/responses", response_model=CompletionReceipt)
    def submit_responses(session_id: str, submission: ResponsesSubmission) -> CompletionReceipt:
        trial().submit_responses(session_id, [r.model_dump() for r in submission.responses])
        return CompletionReceipt(session_id=session_id)

    @app.get("/export")
    def export(
        format: str = Query(default="json", pattern="^(json|csv)$"),
        x_results_secret: str | None = Header(default=None),
    ):
        # experimenter-only data: gated when PATHX_RESULTS_SECRET is configured
        required = os.environ.get("PATHX_RESULTS_SECRET")
        if required and x_results_secret != required:
            return JSONResponse(status_code=403, content={"detail": "invalid results secret"})
        if format == "csv":
            return PlainTextResponse(trial().export_csv(), media_type="text/csv")
        return ExportPayload(**trial().export())

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(static_dir), html=True), name="app")

    return app

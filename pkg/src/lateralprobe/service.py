"""JSON-over-HTTP facade: POST /probe, POST /feedback, GET /health.

Probes run in the request threadpool, so the service handles several at
once; the feedback store serializes its appends internally. A built UI
bundle can be mounted as static files behind the API routes.
"""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .config import PipelineConfig
from .errors import StorageUnavailableError
from .feedback import FeedbackEvent, FeedbackStore
from .pipeline import ProbeError, probe
from .providers.factory import ProviderSet, build_providers

logger = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "empty-input": 400,
    "input-too-long": 400,
    "provider-unavailable": 503,
}


def _error_response(status: int, code: str, message: str, stage: str | None = None) -> JSONResponse:
    body: dict = {"error": {"code": code, "message": message}}
    if stage is not None:
        body["error"]["stage"] = stage
    return JSONResponse(status_code=status, content=body)


class ProbeRequest(BaseModel):
    text: str


class FeedbackRequest(BaseModel):
    """The documented /feedback payload; extra fields are rejected so nothing
    identifying can ride along."""

    model_config = ConfigDict(extra="forbid")

    input_text: str = Field(min_length=1)
    question_index: int = Field(ge=1, le=5)
    question_text: str = Field(min_length=1)


def create_app(
    cfg: PipelineConfig | None = None,
    providers: ProviderSet | None = None,
    feedback_store: FeedbackStore | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    cfg = cfg or PipelineConfig()
    providers = providers or build_providers(cfg)
    feedback_store = feedback_store or FeedbackStore(cfg.feedback_path)

    app = FastAPI(title="lateralprobe", version="0.1.0")
    app.state.cfg = cfg
    app.state.providers = providers
    app.state.feedback_store = feedback_store

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "provider_mode": providers.mode}

    @app.post("/probe")
    def run_probe(request: ProbeRequest):
        try:
            result = probe(request.text, cfg, providers)
        except ProbeError as exc:
            status = _STATUS_BY_CODE.get(exc.code, 502)
            return _error_response(status, exc.code, str(exc), stage=exc.stage)
        return result.to_dict()

    @app.post("/feedback")
    def record_feedback(request: FeedbackRequest):
        event = FeedbackEvent.create(
            request.input_text, request.question_index, request.question_text
        )
        try:
            feedback_store.record(event)
        except StorageUnavailableError as exc:
            logger.error("feedback store unavailable: %s", exc)
            return _error_response(503, exc.code, str(exc))
        return {"ok": True}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app

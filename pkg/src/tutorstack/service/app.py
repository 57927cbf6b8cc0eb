"""The REST surface.

Every response is JSON; every error body is {"code", "message"} with one
machine code per failure mode. Request-body validation failures map to 400
(not FastAPI's default 422, which is reserved for out-of-order timestamps).
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from tutorstack.features.store import OutOfOrderError
from tutorstack.kb.fetch import FetchError
from tutorstack.kb.store import EmptyDocumentError
from tutorstack.rag.orchestrator import TutorUnavailableError
from tutorstack.service.state import AppState, UnknownStudentError


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class IngestBody(BaseModel):
    url: str | None = None
    title: str | None = None
    text: str | None = None


class InteractionBody(BaseModel):
    question_id: str
    skill_id: str
    correct: bool
    timestamp: int


class AskBody(BaseModel):
    question: str
    candidate_question_id: str | None = None


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="tutorstack", version="0.1.0")
    app.state.tutor = state

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_token(request: Request) -> None:
        if not state.token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {state.token}":
            raise ApiError(401, "unauthorized", "missing or invalid bearer token")

    auth = Depends(require_token)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "malformed_body", "message": str(exc.errors()[:3])},
        )

    @app.get("/v1/health")
    def health():
        return state.health()

    @app.post("/v1/ingest", dependencies=[auth])
    def ingest(body: IngestBody):
        has_url = body.url is not None
        has_text = body.text is not None or body.title is not None
        if has_url == has_text:
            raise ApiError(
                400, "malformed_body", "provide either {url} or {title, text}, not both"
            )
        if has_url:
            try:
                result = state.ingest_url(body.url)
            except (FetchError, EmptyDocumentError) as exc:
                raise ApiError(502, "fetch_failed", str(exc)) from exc
        else:
            if not body.title or body.text is None:
                raise ApiError(400, "malformed_body", "manual ingestion needs title and text")
            try:
                result = state.ingest_text(body.title, body.text)
            except EmptyDocumentError as exc:
                raise ApiError(400, "empty_document", str(exc)) from exc
        return {"doc_id": result.doc_id, "chunks": result.n_chunks, "created": result.created}

    @app.post("/v1/students/{student_id}/interactions", dependencies=[auth])
    def post_interaction(student_id: str, body: InteractionBody):
        try:
            result = state.record_interaction(
                student_id, body.question_id, body.skill_id, body.correct, body.timestamp
            )
        except OutOfOrderError as exc:
            raise ApiError(422, "out_of_order", str(exc)) from exc
        except ValueError as exc:
            raise ApiError(400, "malformed_body", str(exc)) from exc
        return {
            "student_id": result.student_id,
            "skill_id": result.skill_id,
            "mastery": result.mastery,
            "observations": result.observations,
        }

    @app.post("/v1/students/{student_id}/ask", dependencies=[auth])
    def ask(student_id: str, body: AskBody):
        if not body.question.strip():
            raise ApiError(400, "empty_question", "question must be non-empty")
        try:
            result = state.ask(student_id, body.question, body.candidate_question_id)
        except TutorUnavailableError as exc:
            raise ApiError(503, "llm_unavailable", str(exc)) from exc
        return {
            "answer": result.answer,
            "citations": result.citations,
            "summary": result.summary.to_dict(),
            "degraded": result.degraded,
        }

    @app.get("/v1/students/{student_id}/state", dependencies=[auth])
    def student_state(student_id: str):
        try:
            summary = state.student_state(student_id)
        except UnknownStudentError as exc:
            raise ApiError(404, "unknown_student", f"no such student: {student_id}") from exc
        return summary.to_dict()

    @app.get("/v1/students/{student_id}/recommendations", dependencies=[auth])
    def recommendations(student_id: str, k: int = 3):
        try:
            result = state.recommendations(student_id, k=k)
        except UnknownStudentError as exc:
            raise ApiError(404, "unknown_student", f"no such student: {student_id}") from exc
        return {
            "items": [rec.to_dict() for rec in result.items],
            "all_skills_strong": result.all_skills_strong,
        }

    @app.post("/v1/admin/reload", dependencies=[auth])
    def reload_model():
        return state.reload_model()

    return app

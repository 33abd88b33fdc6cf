"""HTTP/JSON API over disambiguation sessions, plus static hosting for the
browser UI.

All bodies are JSON; errors come back as ``{"error": {"code", "message"}}``.
Mutations take a per-session lock so concurrent clients always observe a
consistent snapshot.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .astbuild import ast_to_json, default_actions, load_actions_file
from .emitter import DobracketsStyle
from .errors import (
    BadIndexError,
    DocumentChangedError,
    InvalidStatusError,
    PendingAmbiguitiesError,
    StexifyError,
    UnknownFormulaError,
    UnknownSessionError,
)
from .grammar import parse_grammar_text
from .lexing import DEFAULT_REGISTRY, RecognizerRegistry
from .session import FormulaEntry, Session, SessionConfig

_STATUS_CODES = {
    UnknownSessionError: 404,
    UnknownFormulaError: 404,
    BadIndexError: 400,
    InvalidStatusError: 409,
    PendingAmbiguitiesError: 409,
    DocumentChangedError: 409,
}

_PLACEHOLDER = """<!doctype html>
<title>stexify</title>
<h1>stexify session service</h1>
<p>No UI bundle is configured (start with <code>--ui-dir</code>).
The JSON API lives under <code>/sessions</code>.</p>
"""


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._guard = threading.Lock()

    def add(self, session: Session) -> None:
        with self._guard:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.RLock()

    def get(self, session_id: str) -> tuple[Session, threading.RLock]:
        with self._guard:
            if session_id not in self._sessions:
                raise UnknownSessionError(f"no session '{session_id}'")
            return self._sessions[session_id], self._locks[session_id]

    def ids(self) -> list[str]:
        with self._guard:
            return list(self._sessions)


class CreateSessionBody(BaseModel):
    document_path: str
    grammar_path: str
    actions_path: str | None = None


class SelectionBody(BaseModel):
    index: int


class ExportBody(BaseModel):
    dobrackets_style: str | None = None
    output_path: str | None = None


def summary_json(session: Session) -> dict:
    return {
        "session_id": session.id,
        "document_path": session.document_path,
        "grammar": session.grammar_name,
        "total": len(session.entries),
        "counts": session.counts(),
        "pending": session.pending(),
        "exportable": not session.pending(),
    }


def entry_json(entry: FormulaEntry, with_candidates: bool = True) -> dict:
    out = {
        "id": entry.formula.id,
        "raw": entry.formula.raw,
        "kind": entry.formula.kind.value,
        "status": entry.status.value,
        "candidate_count": len(entry.candidates),
        "choice": entry.choice,
        "reason": entry.reason,
    }
    if with_candidates:
        out["candidates"] = [
            {"index": i, "ast": ast_to_json(c.ast), "preview": c.preview}
            for i, c in enumerate(entry.candidates)
        ]
    return out


def create_app(
    store: SessionStore,
    ui_dir: str | None = None,
    registry: RecognizerRegistry = DEFAULT_REGISTRY,
    session_config: SessionConfig = SessionConfig(),
) -> FastAPI:
    app = FastAPI(title="stexify", docs_url=None, redoc_url=None)

    @app.exception_handler(StexifyError)
    async def stexify_error(_req: Request, exc: StexifyError):
        status = _STATUS_CODES.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "validation", "message": str(exc.errors())}},
        )

    @app.exception_handler(OSError)
    async def os_error(_req: Request, exc: OSError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "io", "message": str(exc)}},
        )

    @app.get("/sessions")
    def list_sessions():
        out = []
        for sid in store.ids():
            session, lock = store.get(sid)
            with lock:
                out.append(summary_json(session))
        return out

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        with open(body.grammar_path, "r", encoding="utf-8") as fh:
            grammar = parse_grammar_text(fh.read(), name=body.grammar_path)
        if body.actions_path:
            actions = load_actions_file(grammar, body.actions_path)
        else:
            actions = default_actions(grammar)
        session = Session.create(
            body.document_path, grammar, actions, registry, session_config
        )
        store.add(session)
        return {"session_id": session.id, "summary": summary_json(session)}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session, lock = store.get(sid)
        with lock:
            return summary_json(session)

    @app.get("/sessions/{sid}/formulas")
    def list_formulas(sid: str):
        session, lock = store.get(sid)
        with lock:
            return [entry_json(e, with_candidates=False) for e in session.entries]

    @app.get("/sessions/{sid}/formulas/{fid}")
    def get_formula(sid: str, fid: int):
        session, lock = store.get(sid)
        with lock:
            return entry_json(session.entry(fid))

    @app.post("/sessions/{sid}/formulas/{fid}/selection")
    def select(sid: str, fid: int, body: SelectionBody):
        session, lock = store.get(sid)
        with lock:
            return entry_json(session.select(fid, body.index))

    @app.post("/sessions/{sid}/formulas/{fid}/skip")
    def skip(sid: str, fid: int):
        session, lock = store.get(sid)
        with lock:
            return entry_json(session.skip(fid))

    @app.post("/sessions/{sid}/export")
    def export(sid: str, body: ExportBody | None = None):
        session, lock = store.get(sid)
        body = body or ExportBody()
        style = DobracketsStyle(body.dobrackets_style) if body.dobrackets_style else None
        with lock:
            path = session.export(style, body.output_path)
            replaced = sum(1 for e in session.entries if e.chosen() is not None)
        return {"output_path": path, "replaced": replaced}

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _PLACEHOLDER

    return app

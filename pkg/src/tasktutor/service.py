"""Multi-session HTTP host: REST inputs, server-push event stream, persistence.

Each session appends its records to a transcript file as they happen; on
restart, sessions are rebuilt by replaying those transcripts (logged model
responses are fed back, never re-queried). The event stream is one
directional: clients send input through the three POST endpoints and watch
consequences arrive with gapless sequence numbers.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .dialog import (
    MODE_COMMAND,
    MODE_CONFIRM,
    MODE_DEFINITION,
    DialogSession,
    SessionConfig,
    make_backend,
)
from .errors import BadConfig, TaskTutorError
from .scripts import load_layout
from .transcripts import dumps_record, header_record, read_transcript, rebuild_session

logger = logging.getLogger(__name__)

STREAM_POLL_SECONDS = 0.05


class CreateSessionRequest(BaseModel):
    backend: str = "mock"
    confirmations: bool = True
    layout_path: str | None = None
    scold_budget: int = 2
    max_depth: int = 8
    pot_capacity: int = 3
    cook_ticks: int = 0
    lm_timeout: float = 30.0
    apology_words: list[str] | None = None


class MessageRequest(BaseModel):
    text: str


class ConfirmRequest(BaseModel):
    verdict: str = Field(pattern="^(approve|correct)$")
    correction: Any = None


class SessionHost:
    """One live session plus its lock and transcript appender."""

    def __init__(self, session_id: str, session: DialogSession, created_at: str):
        self.id = session_id
        self.session = session
        self.created_at = created_at
        self.lock = threading.Lock()


class SessionStore:
    def __init__(self, storage_dir: str | Path | None = None):
        self.storage_dir = Path(storage_dir) if storage_dir else None
        if self.storage_dir:
            self.storage_dir.mkdir(parents=True, exist_ok=True)
        self.hosts: dict[str, SessionHost] = {}
        if self.storage_dir:
            self._restore_all()

    # -- persistence ------------------------------------------------------------

    def _transcript_path(self, session_id: str) -> Path:
        assert self.storage_dir is not None
        return self.storage_dir / f"{session_id}.jsonl"

    def _meta_path(self, session_id: str) -> Path:
        assert self.storage_dir is not None
        return self.storage_dir / f"{session_id}.meta.json"

    def _attach_appender(self, host: SessionHost) -> None:
        if not self.storage_dir:
            return
        path = self._transcript_path(host.id)

        def append(event: dict[str, Any]) -> None:
            with path.open("a") as handle:
                handle.write(dumps_record(event) + "\n")

        host.session.listeners.append(append)

    def _restore_all(self) -> None:
        assert self.storage_dir is not None
        for path in sorted(self.storage_dir.glob("*.jsonl")):
            session_id = path.stem
            try:
                header, records = read_transcript(path)
                session = rebuild_session(header, records)
            except TaskTutorError as exc:
                logger.warning("skipping transcript %s: %s", path, exc)
                continue
            created_at = ""
            meta_path = self._meta_path(session_id)
            if meta_path.is_file():
                created_at = json.loads(meta_path.read_text()).get("created_at", "")
            host = SessionHost(session_id, session, created_at)
            self._attach_appender(host)
            self.hosts[session_id] = host

    # -- operations ---------------------------------------------------------------

    def create(self, config: SessionConfig) -> SessionHost:
        layout_text = load_layout(config)
        backend = make_backend(config)
        session = DialogSession(config=config, backend=backend, layout_text=layout_text)
        session_id = uuid.uuid4().hex[:12]
        created_at = datetime.now(timezone.utc).isoformat()
        host = SessionHost(session_id, session, created_at)
        if self.storage_dir:
            header = header_record(config, session.layout_text)
            self._transcript_path(session_id).write_text(dumps_record(header) + "\n")
            self._meta_path(session_id).write_text(
                json.dumps({"id": session_id, "created_at": created_at})
            )
            self._attach_appender(host)
        self.hosts[session_id] = host
        return host

    def get(self, session_id: str) -> SessionHost:
        host = self.hosts.get(session_id)
        if host is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return host

    def record(self, host: SessionHost) -> dict[str, Any]:
        session = host.session
        return {
            "id": host.id,
            "created_at": host.created_at,
            "backend": session.config.backend,
            "confirmations": session.config.confirmations,
            "transcript_path": (
                str(self._transcript_path(host.id)) if self.storage_dir else None
            ),
            "kb": session.kb_document(),
            "metrics": session.export_metrics(),
        }


def _require_mode(session: DialogSession, allowed: tuple[str, ...]) -> None:
    if session.mode not in allowed:
        raise HTTPException(
            status_code=409,
            detail={"error": "wrong_mode", "mode": session.mode},
        )


def create_app(
    storage_dir: str | Path | None = None, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="tasktutor")
    store = SessionStore(storage_dir)
    app.state.store = store

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest) -> dict[str, Any]:
        try:
            config = SessionConfig.from_dict(
                {k: v for k, v in request.model_dump().items() if v is not None}
            )
            host = store.create(config)
        except (BadConfig, TaskTutorError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"id": host.id, "state": host.session.describe()}

    @app.get("/sessions")
    def list_sessions() -> list[dict[str, Any]]:
        return [
            {
                "id": host.id,
                "created_at": host.created_at,
                "mode": host.session.mode,
            }
            for host in store.hosts.values()
        ]

    @app.post("/sessions/{session_id}/message")
    def post_message(session_id: str, request: MessageRequest) -> dict[str, Any]:
        host = store.get(session_id)
        with host.lock:
            _require_mode(host.session, (MODE_COMMAND, MODE_DEFINITION))
            events = host.session.process_utterance(request.text)
        return {"accepted": True, "events": events}

    @app.post("/sessions/{session_id}/confirm")
    def post_confirmation(session_id: str, request: ConfirmRequest) -> dict[str, Any]:
        host = store.get(session_id)
        with host.lock:
            _require_mode(host.session, (MODE_CONFIRM,))
            events = host.session.resolve_confirmation(
                request.verdict, request.correction
            )
        return {"accepted": True, "events": events}

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str) -> dict[str, Any]:
        host = store.get(session_id)
        with host.lock:
            events = host.session.undo()
        return {"accepted": True, "events": events}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict[str, Any]:
        host = store.get(session_id)
        with host.lock:
            return host.session.describe()

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str) -> dict[str, Any]:
        host = store.get(session_id)
        with host.lock:
            return host.session.export_metrics()

    @app.get("/sessions/{session_id}/record")
    def get_record(session_id: str) -> dict[str, Any]:
        host = store.get(session_id)
        with host.lock:
            return store.record(host)

    @app.get("/sessions/{session_id}/events")
    async def get_events(
        session_id: str, request: Request, since: int = 0, follow: bool = True
    ) -> StreamingResponse:
        host = store.get(session_id)

        async def stream():
            cursor = since
            while True:
                events = host.session.events
                while cursor < len(events):
                    event = events[cursor]
                    cursor += 1
                    payload = json.dumps(event, sort_keys=True, separators=(",", ":"))
                    yield f"id: {event['seq']}\ndata: {payload}\n\n"
                if not follow:
                    return
                if await request.is_disconnected():
                    return
                await asyncio.sleep(STREAM_POLL_SECONDS)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if ui_dir:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app

"""Session-oriented HTTP API for interactive (human-in-the-loop) elicitation.

A human submitting choices goes through exactly the same validator path as a
model backend: the server never trusts the client, so no sequence of API
calls can complete a session whose selection violates the lattice rules.
Sessions persist as audit files (``{session_id}.audit.jsonl``) under the data
directory and survive a service restart.

Endpoints: POST /sessions, GET /sessions/{id}/question, POST
/sessions/{id}/choice, GET /sessions/{id}/spec, GET /sessions/{id}/audit,
GET /families. Errors use {"error": {"code", "message"}}.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import CheckpointError
from .fixtures import load_registry
from .interpreter import KeywordBackend, RetryPolicy
from .model import LatticeRegistry
from .navigator import DONE, build_context
from .orchestrator import (
    AgentState,
    RunBudget,
    RunOutcome,
    RunStatus,
    _apply_choice,
    _finalize,
    _navigate,
    checkpoint_read,
    checkpoint_write,
    new_state,
    resume_elicitation,
    utc_now_iso,
)
from .router import build_centroids, route
from .scribe import compile_spec

PORT_ENV = "LATTICE_ELICIT_PORT"
DATA_DIR_ENV = "LATTICE_ELICIT_DATA_DIR"

MODE_INTERACTIVE = "interactive"
MODE_AUTONOMOUS = "autonomous"

STATUS_AWAITING = "awaiting_choice"
STATUS_RUNNING = "running"
STATUS_COMPLETED = "completed"
STATUS_ABORTED = "aborted"


class ApiError(Exception):
    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message


@dataclass
class Session:
    session_id: str
    mode: str
    state: AgentState
    created_at: str
    status: str = STATUS_RUNNING
    outcome: RunOutcome | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _status_of(state: AgentState) -> str:
    if state.finalized:
        # The finalize record knows whether the final global check passed.
        for record in reversed(state.history):
            if record.payload.get("event") == "finalized":
                passed = record.payload.get("status") == "completed"
                return STATUS_COMPLETED if passed else STATUS_ABORTED
        return STATUS_ABORTED
    if state.current_decision is not None:
        return STATUS_AWAITING
    return STATUS_RUNNING


class SessionStore:
    """In-memory sessions backed by per-session audit files."""

    def __init__(self, registry: LatticeRegistry, data_dir: Path, clock):
        self.registry = registry
        self.data_dir = data_dir
        self.clock = clock
        self.sessions: dict[str, Session] = {}
        self._guard = threading.Lock()

    def audit_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.audit.jsonl"

    def persist(self, session: Session) -> None:
        checkpoint_write(session.state, self.audit_path(session.session_id))

    def get(self, session_id: str) -> Session:
        with self._guard:
            if session_id in self.sessions:
                return self.sessions[session_id]
        # Session ids are server-issued hex tokens; anything else must not
        # reach the filesystem.
        if not session_id.isalnum():
            raise ApiError(404, "unknown_session", f"no session {session_id}")
        path = self.audit_path(session_id)
        if not path.exists():
            raise ApiError(404, "unknown_session", f"no session {session_id}")
        try:
            state = checkpoint_read(path)
        except CheckpointError as exc:
            raise ApiError(500, "corrupt_session", str(exc))
        session = Session(
            session_id=session_id,
            mode=state.history[0].payload.get("mode", MODE_INTERACTIVE),
            state=state,
            created_at=state.history[0].timestamp,
            status=_status_of(state),
        )
        with self._guard:
            self.sessions.setdefault(session_id, session)
            return self.sessions[session_id]

    def add(self, session: Session) -> None:
        with self._guard:
            self.sessions[session.session_id] = session


def create_app(
    registry: LatticeRegistry | None = None,
    data_dir: str | Path | None = None,
    clock: Callable[[], str] = utc_now_iso,
    backend_factory: Callable | None = None,
) -> FastAPI:
    """Build the service; every collaborator is injectable for tests."""
    registry = registry or load_registry()
    data_dir = Path(
        data_dir or os.environ.get(DATA_DIR_ENV, "./elicit-data")
    )
    data_dir.mkdir(parents=True, exist_ok=True)
    backend_factory = backend_factory or KeywordBackend
    store = SessionStore(registry, data_dir, clock)
    centroids = build_centroids(registry)

    app = FastAPI(title="lattice-elicit service")
    app.state.store = store
    # The wizard client is served as static files from another origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    def question_payload(session: Session) -> dict:
        lattice = registry.get(session.state.family_id)
        context = build_context(lattice, session.state.current_decision)
        return {
            "session_id": session.session_id,
            "question": context.to_dict(),
            "violations": [v.to_dict() for v in session.state.current_feedback],
            "attempt": session.state.current_attempt,
            "progress": {
                "decisions_answered": sum(
                    1
                    for nid in session.state.frontier.visited
                    if lattice.nodes[nid].is_discriminant
                ),
                "total_discriminants": len(lattice.discriminants()),
            },
        }

    def advance_to_question(session: Session) -> None:
        """Navigate until a decision or completion; interactive sessions stop
        at AwaitingChoice. Completion runs the full global validation and
        appends the finalize record, exactly like an autonomous run."""
        lattice = registry.get(session.state.family_id)
        state = session.state
        while state.current_decision is None:
            decision = _navigate(state, lattice, None, clock)
            if decision == DONE:
                outcome = _finalize(state, lattice, None, clock, time.monotonic())
                session.outcome = outcome
                session.status = (
                    STATUS_COMPLETED
                    if outcome.status is RunStatus.COMPLETED
                    else STATUS_ABORTED
                )
                return
        session.status = STATUS_AWAITING

    @app.post("/sessions")
    async def create_session(body: dict):
        family_id = body.get("family_id")
        vision = body.get("vision") or ""
        mode = body.get("mode", MODE_INTERACTIVE)
        if mode not in (MODE_INTERACTIVE, MODE_AUTONOMOUS):
            raise ApiError(400, "bad_mode", f"unknown mode {mode}")
        routed = False
        if not family_id:
            if not vision.strip():
                raise ApiError(
                    400, "missing_input", "provide a family_id or a non-empty vision"
                )
            family_id = route(vision, centroids)
            routed = True
        if family_id not in registry:
            raise ApiError(404, "unknown_family", f"no family {family_id}")
        lattice = registry.get(family_id)
        session_id = uuid.uuid4().hex
        created_at = clock()

        if mode == MODE_AUTONOMOUS:
            state = new_state(
                lattice, vision, RunBudget(), clock, extra={"mode": mode}
            )
            outcome = resume_elicitation(
                state,
                lattice,
                backend_factory(),
                policy=RetryPolicy(),
                audit_path=store.audit_path(session_id),
                clock=clock,
            )
            session = Session(
                session_id=session_id,
                mode=mode,
                state=state,
                created_at=created_at,
                status=STATUS_COMPLETED
                if outcome.status is RunStatus.COMPLETED
                else STATUS_ABORTED,
                outcome=outcome,
            )
            store.add(session)
            return {
                "session_id": session_id,
                "family_id": family_id,
                "routed": routed,
                "mode": mode,
                "status": session.status,
            }

        # Humans may retry a decision indefinitely; the tight autonomous-loop
        # caps do not apply to interactive sessions.
        budget = RunBudget(max_transitions=100_000, max_model_calls=0)
        state = new_state(lattice, vision, budget, clock, extra={"mode": mode})
        session = Session(
            session_id=session_id, mode=mode, state=state, created_at=created_at
        )
        advance_to_question(session)
        store.add(session)
        store.persist(session)
        response = {
            "session_id": session_id,
            "family_id": family_id,
            "routed": routed,
            "mode": mode,
            "status": session.status,
        }
        if session.status == STATUS_AWAITING:
            response["question"] = question_payload(session)["question"]
        return response

    @app.get("/families")
    async def list_families():
        families = []
        for family_id in registry.family_ids():
            lattice = registry.get(family_id)
            families.append(
                {
                    "family_id": family_id,
                    "root": lattice.root,
                    "node_count": len(lattice),
                    "discriminants": len(lattice.discriminants()),
                }
            )
        return {"families": families}

    @app.get("/sessions/{session_id}/question")
    async def get_question(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.status != STATUS_AWAITING:
                raise ApiError(
                    409,
                    "wrong_status",
                    f"session is {session.status}, not awaiting a choice",
                )
            return question_payload(session)

    @app.post("/sessions/{session_id}/choice")
    async def submit_choice(session_id: str, body: dict):
        ids = body.get("selected_ids")
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise ApiError(400, "bad_choice", "selected_ids must be a string array")
        session = store.get(session_id)
        with session.lock:
            if session.status != STATUS_AWAITING:
                raise ApiError(
                    409,
                    "wrong_status",
                    f"session is {session.status}, not awaiting a choice",
                )
            lattice = registry.get(session.state.family_id)
            node_id = session.state.current_decision
            accepted = _apply_choice(
                session.state, lattice, node_id, set(ids), "interpreter", None, clock
            )
            if accepted:
                advance_to_question(session)
                violations = []
            else:
                violations = [v.to_dict() for v in session.state.current_feedback]
            store.persist(session)
            return {
                "accepted": accepted,
                "violations": violations,
                "next": session.status,
            }

    @app.get("/sessions/{session_id}/spec")
    async def get_spec(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.status != STATUS_COMPLETED:
                raise ApiError(
                    409, "wrong_status", f"session is {session.status}, not completed"
                )
            lattice = registry.get(session.state.family_id)
            state = session.state
            outcome = session.outcome or RunOutcome(
                status=RunStatus.COMPLETED,
                final_selection=frozenset(state.selection),
                violations_encountered=state.violations_encountered,
                rejections=state.rejections,
                model_calls=state.budget.model_calls_used,
                repairs=state.repairs,
                transitions=state.budget.transitions_used,
                duration=0.0,
            )
            doc = compile_spec(
                lattice,
                state.selection,
                outcome,
                vision=state.vision,
                provenance=state.provenance,
                timestamp=session.created_at,
            )
            return {"markdown": doc.markdown, "sidecar": doc.sidecar}

    @app.get("/sessions/{session_id}/audit")
    async def get_audit(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "session_id": session_id,
                "records": [r.to_dict() for r in session.state.history],
            }

    return app


def main() -> None:  # pragma: no cover - thin runner
    import uvicorn

    port = int(os.environ.get(PORT_ENV, "8714"))
    uvicorn.run(create_app(), host="127.0.0.1", port=port)


if __name__ == "__main__":  # pragma: no cover
    main()

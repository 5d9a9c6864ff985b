"""The elicitation loop: navigate, propose, validate, advance (or repair).

State transitions are appended to an audit trail before the next step runs,
one JSON line per transition. Each record carries the delta it applied, so
replaying a trail reconstructs the exact session state: the same file format
serves as audit log and checkpoint.

Hard caps guard against non-convergence: a transition budget (default 250)
and a model-call budget (default 100). Counters never exceed their caps; a
budget abort appends no extra record, so an aborted trail can be resumed
with a larger budget.
"""

from __future__ import annotations

import io
import json
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable

from .errors import CheckpointError, ProposalParseError, TransportError
from .interpreter import InterpreterBackend, RetryPolicy, propose
from .model import Lattice, NodeId, NodeType
from .navigator import (
    DONE,
    Frontier,
    advance,
    build_context,
    decision_child_ids,
    init_frontier,
    next_decision,
)
from .validator import Violation, is_complete, validate_global, validate_node

logger = logging.getLogger(__name__)

DEFAULT_MAX_TRANSITIONS = 250
DEFAULT_MAX_MODEL_CALLS = 100

PROVENANCE_AUTO = "auto-core"
PROVENANCE_INTERPRETER = "interpreter"
PROVENANCE_REPAIRED = "repaired"


class Agent(Enum):
    NAVIGATOR = "navigator"
    INTERPRETER = "interpreter"
    VALIDATOR = "validator"
    SCRIBE = "scribe"
    REPAIR = "repair"


class RunStatus(Enum):
    COMPLETED = "completed"
    ABORTED_BUDGET = "aborted_budget"
    ABORTED_ERROR = "aborted_error"


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass
class RunBudget:
    """Hard caps for one run; the counters live here as well."""

    max_transitions: int = DEFAULT_MAX_TRANSITIONS
    max_model_calls: int = DEFAULT_MAX_MODEL_CALLS
    transitions_used: int = 0
    model_calls_used: int = 0

    def transitions_left(self) -> bool:
        return self.transitions_used < self.max_transitions

    def model_calls_left(self) -> bool:
        return self.model_calls_used < self.max_model_calls


@dataclass(frozen=True)
class TransitionRecord:
    """One audit entry. payload carries the state delta this step applied."""

    step_index: int
    agent: Agent
    node: NodeId | None
    payload: dict
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "step_index": self.step_index,
            "agent": self.agent.value,
            "node": self.node,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransitionRecord":
        return cls(
            step_index=data["step_index"],
            agent=Agent(data["agent"]),
            node=data.get("node"),
            payload=data["payload"],
            timestamp=data["timestamp"],
        )


@dataclass
class AgentState:
    """Typed session state: vision, history, selection, error log, frontier."""

    vision: str
    family_id: str
    frontier: Frontier
    budget: RunBudget
    selection: set = field(default_factory=set)
    provenance: dict = field(default_factory=dict)  # NodeId -> provenance tag
    error_log: list = field(default_factory=list)  # list[Violation]
    history: list = field(default_factory=list)  # list[TransitionRecord]
    current_decision: NodeId | None = None
    current_attempt: int = 1
    current_feedback: list = field(default_factory=list)  # list[Violation]
    rejections: int = 0
    repairs: int = 0
    finalized: bool = False

    @property
    def violations_encountered(self) -> int:
        return len(self.error_log)


@dataclass(frozen=True)
class RunOutcome:
    status: RunStatus
    final_selection: frozenset
    violations_encountered: int
    rejections: int
    model_calls: int
    repairs: int
    transitions: int
    duration: float
    final_violations: tuple = ()

    @property
    def completed(self) -> bool:
        return self.status is RunStatus.COMPLETED


# ---------------------------------------------------------------------------
# State construction and transitions
# ---------------------------------------------------------------------------


def new_state(
    lattice: Lattice,
    vision: str,
    budget: RunBudget | None = None,
    clock: Callable[[], str] = utc_now_iso,
    extra: dict | None = None,
) -> AgentState:
    """Fresh session state; the init record is transition #1."""
    budget = budget or RunBudget()
    state = AgentState(
        vision=vision,
        family_id=lattice.family_id,
        frontier=init_frontier(lattice),
        budget=budget,
    )
    payload = {
        "event": "init",
        "vision": vision,
        "family_id": lattice.family_id,
        "budgets": {
            "max_transitions": budget.max_transitions,
            "max_model_calls": budget.max_model_calls,
        },
        "pending_after": list(state.frontier.pending),
    }
    if extra:
        payload.update(extra)
    _append(state, Agent.NAVIGATOR, None, payload, clock)
    return state


def _append(
    state: AgentState,
    agent: Agent,
    node: NodeId | None,
    payload: dict,
    clock: Callable[[], str],
    sink: io.TextIOBase | None = None,
) -> TransitionRecord:
    record = TransitionRecord(
        step_index=len(state.history),
        agent=agent,
        node=node,
        payload=payload,
        timestamp=clock(),
    )
    state.history.append(record)
    state.budget.transitions_used += 1
    if sink is not None:
        sink.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        sink.flush()
    return record


def _cur_payload(state: AgentState) -> dict:
    return {
        "decision": state.current_decision,
        "attempt": state.current_attempt,
        "feedback": [v.to_dict() for v in state.current_feedback],
    }


# ---------------------------------------------------------------------------
# Repair
# ---------------------------------------------------------------------------


def repair(lattice: Lattice, node: NodeId, selection: set) -> set:
    """Deterministic minimal valid resolution of an exhausted decision.

    single_adaptor: the first child in child-list order (none when one is
    already selected through another path); multiple_adaptor: first child
    unless one is already selected; option groups: nothing. The result always
    passes validate_node.
    """
    kind = lattice.nodes[node].node_type
    children = decision_child_ids(lattice, node)
    already = sum(1 for c in lattice.nodes[node].children if c in selection)
    if kind is NodeType.SINGLE_ADAPTOR:
        return set() if already == 1 else {children[0]}
    if kind is NodeType.MULTIPLE_ADAPTOR:
        return set() if already >= 1 else {children[0]}
    return set()


# ---------------------------------------------------------------------------
# The loop
# ---------------------------------------------------------------------------


def run_elicitation(
    lattice: Lattice,
    vision: str,
    backend: InterpreterBackend,
    budget: RunBudget | None = None,
    policy: RetryPolicy | None = None,
    audit_path: str | Path | None = None,
    clock: Callable[[], str] = utc_now_iso,
) -> RunOutcome:
    """Run a full elicitation session from scratch; see resume_elicitation."""
    state = new_state(lattice, vision, budget, clock)
    return _drive(state, lattice, backend, policy or RetryPolicy(), audit_path, clock)


def resume_elicitation(
    state: AgentState,
    lattice: Lattice,
    backend: InterpreterBackend,
    policy: RetryPolicy | None = None,
    audit_path: str | Path | None = None,
    clock: Callable[[], str] = utc_now_iso,
) -> RunOutcome:
    """Continue a (checkpointed) session to its outcome."""
    if state.family_id != lattice.family_id:
        raise ValueError(
            f"state belongs to family {state.family_id!r}, got lattice "
            f"{lattice.family_id!r}"
        )
    return _drive(state, lattice, backend, policy or RetryPolicy(), audit_path, clock)


def _drive(
    state: AgentState,
    lattice: Lattice,
    backend: InterpreterBackend,
    policy: RetryPolicy,
    audit_path: str | Path | None,
    clock: Callable[[], str],
) -> RunOutcome:
    start = time.monotonic()
    sink: io.TextIOBase | None = None
    if audit_path is not None:
        path = Path(audit_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        sink = path.open("a", encoding="utf-8")
        if path.stat().st_size == 0:
            # Fresh file: persist the history accumulated so far (init record,
            # and anything a caller added before enabling auditing).
            for record in state.history:
                sink.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
            sink.flush()
    try:
        return _loop(state, lattice, backend, policy, sink, clock, start)
    finally:
        if sink is not None:
            sink.close()


def _outcome(state: AgentState, status: RunStatus, start: float, final=()) -> RunOutcome:
    return RunOutcome(
        status=status,
        final_selection=frozenset(state.selection),
        violations_encountered=state.violations_encountered,
        rejections=state.rejections,
        model_calls=state.budget.model_calls_used,
        repairs=state.repairs,
        transitions=state.budget.transitions_used,
        duration=time.monotonic() - start,
        final_violations=tuple(final),
    )


def _loop(
    state: AgentState,
    lattice: Lattice,
    backend: InterpreterBackend,
    policy: RetryPolicy,
    sink,
    clock: Callable[[], str],
    start: float,
) -> RunOutcome:
    while True:
        if state.current_decision is None:
            if not state.budget.transitions_left():
                return _outcome(state, RunStatus.ABORTED_BUDGET, start)
            decision = _navigate(state, lattice, sink, clock)
            if decision == DONE:
                return _finalize(state, lattice, sink, clock, start)
            continue

        node_id = state.current_decision
        context = build_context(lattice, node_id)

        # Interpreter transition.
        if not state.budget.transitions_left():
            return _outcome(state, RunStatus.ABORTED_BUDGET, start)
        if not state.budget.model_calls_left():
            return _outcome(state, RunStatus.ABORTED_BUDGET, start)
        try:
            proposal = propose(
                backend, state.vision, context, state.current_feedback,
                state.current_attempt,
            )
        except TransportError as exc:
            state.current_attempt += 1
            _append(
                state, Agent.INTERPRETER, node_id,
                {
                    "event": "transport_error",
                    "error": str(exc),
                    "model_call": False,
                    "cur": _cur_payload(state),
                },
                clock, sink,
            )
            if policy.exhausted(state.current_attempt):
                # A model outage is never repaired silently; surface it.
                return _outcome(state, RunStatus.ABORTED_ERROR, start)
            continue
        except ProposalParseError as exc:
            state.budget.model_calls_used += 1
            state.current_attempt += 1
            _append(
                state, Agent.INTERPRETER, node_id,
                {
                    "event": "parse_error",
                    "error": str(exc),
                    "model_call": True,
                    "cur": _cur_payload(state),
                },
                clock, sink,
            )
            if policy.exhausted(state.current_attempt):
                outcome = _exhaust(state, lattice, node_id, policy, sink, clock, start)
                if outcome is not None:
                    return outcome
            continue

        state.budget.model_calls_used += 1
        _append(
            state, Agent.INTERPRETER, node_id,
            {
                "event": "proposal",
                "attempt": state.current_attempt,
                "raw": proposal.raw_output,
                "selected_ids": sorted(proposal.selected_ids),
                "model_call": True,
                "cur": _cur_payload(state),
            },
            clock, sink,
        )

        # Validator transition.
        if not state.budget.transitions_left():
            return _outcome(state, RunStatus.ABORTED_BUDGET, start)
        accepted = _apply_choice(
            state, lattice, node_id, set(proposal.selected_ids),
            PROVENANCE_INTERPRETER, sink, clock,
        )
        if not accepted and policy.exhausted(state.current_attempt):
            outcome = _exhaust(state, lattice, node_id, policy, sink, clock, start)
            if outcome is not None:
                return outcome


def _navigate(state: AgentState, lattice: Lattice, sink, clock) -> NodeId:
    before = set(state.selection)
    visited_before = set(state.frontier.visited)
    decision = next_decision(state.frontier, lattice, state.selection)
    auto = sorted(state.selection - before)
    for nid in auto:
        state.provenance.setdefault(nid, PROVENANCE_AUTO)
    if decision != DONE:
        state.current_decision = decision
        state.current_attempt = 1
        state.current_feedback = []
    _append(
        state, Agent.NAVIGATOR, None if decision == DONE else decision,
        {
            "event": "decision" if decision != DONE else "done",
            "auto_selected": auto,
            "pending_after": list(state.frontier.pending),
            "visited_added": sorted(state.frontier.visited - visited_before),
            "cur": _cur_payload(state),
        },
        clock, sink,
    )
    return decision


def _apply_choice(
    state: AgentState,
    lattice: Lattice,
    node_id: NodeId,
    chosen: set,
    provenance: str,
    sink,
    clock,
) -> bool:
    """Validate a tentative choice; commit and advance on success.

    On rejection the selection is untouched; the violations join the error
    log and become the feedback for the next attempt. Returns acceptance.
    """
    tentative = state.selection | chosen
    violations = validate_node(lattice, tentative, node_id)
    if violations:
        state.error_log.extend(violations)
        state.rejections += 1
        state.current_feedback = list(violations)
        state.current_attempt += 1
        _append(
            state, Agent.VALIDATOR, node_id,
            {
                "event": "rejected",
                "violations": [v.to_dict() for v in violations],
                "err_add": [v.to_dict() for v in violations],
                "cur": _cur_payload(state),
            },
            clock, sink,
        )
        return False

    added = sorted(chosen - state.selection)
    state.selection.update(chosen)
    for nid in added:
        state.provenance.setdefault(nid, provenance)
    visited_before = set(state.frontier.visited)
    decision_children = set(decision_child_ids(lattice, node_id))
    advance(state.frontier, node_id, chosen & decision_children, lattice)
    state.current_decision = None
    state.current_attempt = 1
    state.current_feedback = []
    _append(
        state, Agent.VALIDATOR if provenance != PROVENANCE_REPAIRED else Agent.REPAIR,
        node_id,
        {
            "event": "accepted" if provenance != PROVENANCE_REPAIRED else "repaired",
            "selection_added": added,
            "provenance": {nid: state.provenance[nid] for nid in added},
            "pending_after": list(state.frontier.pending),
            "visited_added": sorted(state.frontier.visited - visited_before),
            "cur": _cur_payload(state),
        },
        clock, sink,
    )
    return True


def _exhaust(
    state: AgentState,
    lattice: Lattice,
    node_id: NodeId,
    policy: RetryPolicy,
    sink,
    clock,
    start: float,
) -> RunOutcome | None:
    """Retry budget for one decision is spent: repair it or abort the run."""
    if policy.on_exhaustion == "abort":
        return _outcome(state, RunStatus.ABORTED_ERROR, start)
    if not state.budget.transitions_left():
        return _outcome(state, RunStatus.ABORTED_BUDGET, start)
    choice = repair(lattice, node_id, state.selection)
    state.repairs += 1
    accepted = _apply_choice(
        state, lattice, node_id, choice, PROVENANCE_REPAIRED, sink, clock
    )
    if not accepted:  # repair() guarantees validity; treat failure as a bug
        raise RuntimeError(f"repair choice rejected at {node_id}")
    return None


def _finalize(
    state: AgentState, lattice: Lattice, sink, clock, start: float
) -> RunOutcome:
    final = validate_global(lattice, state.selection)
    complete = is_complete(lattice, state.selection)
    ok = not final and complete
    state.finalized = True
    if state.budget.transitions_left():
        _append(
            state, Agent.SCRIBE, None,
            {
                "event": "finalized",
                "status": "completed" if ok else "aborted_error",
                "final_violations": [v.to_dict() for v in final],
                "complete": complete,
                "cur": _cur_payload(state),
            },
            clock, sink,
        )
    status = RunStatus.COMPLETED if ok else RunStatus.ABORTED_ERROR
    return _outcome(state, status, start, final=final)


# ---------------------------------------------------------------------------
# Checkpointing
# ---------------------------------------------------------------------------


def checkpoint_write(state: AgentState, sink) -> None:
    """Write the full audit history, one JSON line per transition.

    sink may be a path or an open text stream. Writing a path replaces the
    file atomically.
    """
    if isinstance(sink, (str, Path)):
        path = Path(sink)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            _write_records(state, fh)
        tmp.replace(path)
    else:
        _write_records(state, sink)


def _write_records(state: AgentState, fh) -> None:
    for record in state.history:
        fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")


def checkpoint_read(source) -> AgentState:
    """Rebuild an AgentState by replaying an audit stream.

    A trailing corrupt/truncated line is dropped with a warning; a stream
    with no usable init record raises CheckpointError. Corruption before the
    end truncates the replay at the first bad line (last complete prefix).
    """
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8") as fh:
            lines = fh.readlines()
    else:
        lines = source.readlines()

    records: list[TransitionRecord] = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(TransitionRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            logger.warning(
                "checkpoint: dropping record %d and everything after it (%s)", i, exc
            )
            break
    if not records:
        raise CheckpointError("no complete records in checkpoint stream")
    init = records[0]
    if init.payload.get("event") != "init":
        raise CheckpointError("first record is not an init record")

    budgets = init.payload.get("budgets", {})
    budget = RunBudget(
        max_transitions=budgets.get("max_transitions", DEFAULT_MAX_TRANSITIONS),
        max_model_calls=budgets.get("max_model_calls", DEFAULT_MAX_MODEL_CALLS),
    )
    state = AgentState(
        vision=init.payload.get("vision", ""),
        family_id=init.payload.get("family_id", ""),
        frontier=Frontier(pending=list(init.payload.get("pending_after", []))),
        budget=budget,
    )
    for record in records:
        _replay(state, record)
    return state


def _replay(state: AgentState, record: TransitionRecord) -> None:
    payload = record.payload
    state.history.append(record)
    state.budget.transitions_used += 1
    if payload.get("model_call"):
        state.budget.model_calls_used += 1
    for nid in payload.get("auto_selected", []):
        state.selection.add(nid)
        state.provenance.setdefault(nid, PROVENANCE_AUTO)
    for nid in payload.get("selection_added", []):
        state.selection.add(nid)
    for nid, tag in payload.get("provenance", {}).items():
        state.provenance.setdefault(nid, tag)
    if "pending_after" in payload:
        state.frontier.pending = list(payload["pending_after"])
    for nid in payload.get("visited_added", []):
        state.frontier.visited.add(nid)
    for v in payload.get("err_add", []):
        state.error_log.append(Violation.from_dict(v))
    if payload.get("event") == "rejected":
        state.rejections += 1
    if payload.get("event") == "repaired":
        state.repairs += 1
    if payload.get("event") == "finalized":
        state.finalized = True
    cur = payload.get("cur")
    if cur is not None:
        state.current_decision = cur.get("decision")
        state.current_attempt = cur.get("attempt", 1)
        state.current_feedback = [
            Violation.from_dict(v) for v in cur.get("feedback", [])
        ]

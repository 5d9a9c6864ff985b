"""Interpreter backends: map (vision, decision context, feedback) to proposals.

A backend is anything with a ``generate`` method producing raw text from
which a JSON proposal is parsed. Backends are untrusted by design: whatever
they emit is handed to the validator, never applied directly. Shipped
backends:

* ModelServerBackend: HTTP adapter for an Ollama-style local model server
* KeywordBackend:      deterministic token-overlap scorer (offline/CI)
* ScriptedBackend:     replays a fixed node -> ids script
* FaultyBackend:       seeded fault injection around a correct base proposal
"""

from __future__ import annotations

import json
import os
import random
import re
from dataclasses import dataclass
from typing import Protocol

import requests

from .errors import ProposalParseError, TransportError
from .model import NodeType
from .navigator import DecisionContext

MODEL_URL_ENV = "LATTICE_ELICIT_MODEL_URL"
DEFAULT_MODEL = "llama3.1"

# The prompt sent to the model server is pinned; runs are reproducible given
# a deterministic server (temperature 0 is always requested).
PROMPT_TEMPLATE = """\
You are the interpreter agent of a requirements elicitation engine.
Given one decision point of a requirement lattice and the stakeholder's
project vision, choose which child requirement ids to include.

Decision rules:
- single_adaptor: choose exactly one child id.
- multiple_adaptor: choose one or more child ids.
- option: choose any subset (possibly empty) of the listed option ids.

Respond with a single JSON object and nothing else:
{{"selected_ids": ["<id>", ...], "rationale": "<one short sentence>"}}

Decision context:
{context}

Project vision:
{vision}
{feedback}Attempt number: {attempt}
"""

_FEEDBACK_HEADER = "Your previous selection was rejected by the validator:\n"


@dataclass(frozen=True)
class Proposal:
    """A parsed-but-untrusted selection suggestion."""

    selected_ids: frozenset
    rationale: str
    raw_output: str


@dataclass(frozen=True)
class RetryPolicy:
    """Per-decision retry budget; retry_cap=None means unbounded retries."""

    retry_cap: int | None = 5
    on_exhaustion: str = "repair"  # "repair" | "abort"

    def __post_init__(self) -> None:
        if self.retry_cap is not None and self.retry_cap < 1:
            raise ValueError("retry_cap must be >= 1")
        if self.on_exhaustion not in ("repair", "abort"):
            raise ValueError("on_exhaustion must be 'repair' or 'abort'")

    def exhausted(self, next_attempt: int) -> bool:
        return self.retry_cap is not None and next_attempt > 1 + self.retry_cap


class InterpreterBackend(Protocol):
    def generate(
        self,
        vision: str,
        context: DecisionContext,
        feedback: list,
        attempt: int,
    ) -> str:
        """Produce raw text proposing child ids for the decision."""
        ...


def build_prompt(
    vision: str, context: DecisionContext, feedback: list, attempt: int
) -> str:
    """Render the pinned prompt; prior violation messages appear verbatim."""
    if feedback:
        lines = "".join(f"- {v.message}\n" for v in feedback)
        feedback_block = _FEEDBACK_HEADER + lines + "\n"
    else:
        feedback_block = ""
    return PROMPT_TEMPLATE.format(
        context=context.to_prompt_json(),
        vision=vision.strip(),
        feedback=feedback_block,
        attempt=attempt,
    )


def parse_proposal(raw: str, context: DecisionContext) -> frozenset:
    """Extract the first JSON object carrying "selected_ids" from raw text.

    Tolerates surrounding prose and code fences. Ids that are not children
    of the decision are retained on purpose: repair is the validator's job,
    not the parser's.
    """
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", raw):
        try:
            obj, _ = decoder.raw_decode(raw, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict) and isinstance(obj.get("selected_ids"), list):
            ids = obj["selected_ids"]
            if all(isinstance(i, str) for i in ids):
                return frozenset(ids)
    raise ProposalParseError("no JSON object with a selected_ids array found")


def propose(
    backend: InterpreterBackend,
    vision: str,
    context: DecisionContext,
    feedback: list,
    attempt: int,
) -> Proposal:
    """One backend round-trip: generate raw text, parse it into a Proposal.

    Raises TransportError when the backend cannot be reached and
    ProposalParseError when its output carries no selection; both count as
    failed attempts upstream.
    """
    if attempt < 1:
        raise ValueError("attempt starts at 1")
    raw = backend.generate(vision, context, list(feedback), attempt)
    ids = parse_proposal(raw, context)
    rationale = ""
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", raw):
        try:
            obj, _ = decoder.raw_decode(raw, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict) and "selected_ids" in obj:
            rationale = str(obj.get("rationale", ""))
            break
    return Proposal(selected_ids=ids, rationale=rationale, raw_output=raw)


# ---------------------------------------------------------------------------
# Keyword backend (deterministic, offline)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> set:
    return set(_TOKEN_RE.findall(text.casefold()))


def keyword_propose(vision: str, context: DecisionContext) -> Proposal:
    """Deterministic token-overlap selection.

    Each child is scored by the number of distinct case-folded tokens shared
    between the vision and the child's title+statement. single_adaptor takes
    the argmax (ties by child order); multiple_adaptor takes every child with
    a positive score, falling back to the first child; option groups take the
    positively scored children only.
    """
    vision_tokens = _tokens(vision)
    scores = [
        (child, len(vision_tokens & _tokens(child.title + " " + child.statement)))
        for child in context.children
    ]
    kind = context.decision_kind
    if kind is NodeType.SINGLE_ADAPTOR:
        best = max(scores, key=lambda cs: cs[1])[1] if scores else 0
        chosen = [next(c for c, s in scores if s == best)] if scores else []
    elif kind is NodeType.MULTIPLE_ADAPTOR:
        chosen = [c for c, s in scores if s > 0]
        if not chosen and scores:
            chosen = [scores[0][0]]
    else:
        chosen = [c for c, s in scores if s > 0]
    ids = [c.id for c in chosen]
    rationale = "token overlap: " + ", ".join(
        f"{c.id}={s}" for c, s in scores
    )
    raw = json.dumps({"selected_ids": ids, "rationale": rationale})
    return Proposal(selected_ids=frozenset(ids), rationale=rationale, raw_output=raw)


class KeywordBackend:
    """Backend wrapper over keyword_propose; ignores feedback (it is already
    deterministic and validation-clean by construction)."""

    def generate(
        self, vision: str, context: DecisionContext, feedback: list, attempt: int
    ) -> str:
        return keyword_propose(vision, context).raw_output


# ---------------------------------------------------------------------------
# Scripted backend (replay)
# ---------------------------------------------------------------------------


class ScriptedBackend:
    """Replays a fixed mapping node_id -> iterable of child ids.

    Decisions missing from the script fall back to the keyword rule with an
    empty vision: first child for single/multiple adaptors, no options.
    """

    def __init__(self, script: dict | None = None):
        self.script = {k: list(v) for k, v in (script or {}).items()}

    def generate(
        self, vision: str, context: DecisionContext, feedback: list, attempt: int
    ) -> str:
        node_id = context.node.id
        if node_id in self.script:
            ids = list(self.script[node_id])
            return json.dumps({"selected_ids": ids, "rationale": "scripted"})
        return keyword_propose("", context).raw_output


# ---------------------------------------------------------------------------
# Fault injection
# ---------------------------------------------------------------------------

FAULT_MODES = ("select_all", "select_none", "ghost_id", "unparseable")


class FaultyBackend:
    """Wraps a correct base proposal with seeded faults.

    With probability fault_rate a call is sabotaged by one of four modes:
    select every child of a single_adaptor, select nothing for a
    multiple_adaptor, emit a nonexistent id, or emit unparseable prose.
    These reproduce the classic pre-validation failure shapes: wrong
    cardinalities, missing mandatory picks, and invented identifiers.
    """

    def __init__(
        self,
        fault_rate: float = 0.5,
        seed: int = 0,
        base: InterpreterBackend | None = None,
    ):
        if not 0.0 <= fault_rate <= 1.0:
            raise ValueError("fault_rate must be within [0, 1]")
        self.fault_rate = fault_rate
        self.rng = random.Random(seed)
        self.base = base or KeywordBackend()

    def generate(
        self, vision: str, context: DecisionContext, feedback: list, attempt: int
    ) -> str:
        if self.rng.random() >= self.fault_rate:
            return self.base.generate(vision, context, feedback, attempt)
        mode = self.rng.choice(FAULT_MODES)
        kind = context.decision_kind
        if mode == "select_all" and kind is NodeType.SINGLE_ADAPTOR:
            ids = [c.id for c in context.children]
        elif mode == "select_none" and kind is NodeType.MULTIPLE_ADAPTOR:
            ids = []
        elif mode == "ghost_id":
            ids = [f"ghost.{self.rng.randrange(10_000)}"]
        elif mode == "unparseable":
            return "I would simply pick whichever option feels right."
        else:
            # Fault mode does not apply to this decision kind; misbehave in a
            # kind-appropriate way instead.
            if kind is NodeType.SINGLE_ADAPTOR:
                ids = [c.id for c in context.children]
            else:
                ids = [f"ghost.{self.rng.randrange(10_000)}"]
        return json.dumps({"selected_ids": ids, "rationale": f"fault:{mode}"})


# ---------------------------------------------------------------------------
# Model server adapter
# ---------------------------------------------------------------------------


class ModelServerBackend:
    """HTTP adapter for an Ollama-style completion server.

    Request:  POST {base_url} with {"model", "prompt", "temperature": 0,
    "stream": false}; response: {"response": str}. The wire shape lives only
    here. Temperature 0 is always sent; a seed is included when configured
    so servers that support one stay reproducible.
    """

    def __init__(
        self,
        base_url: str | None = None,
        model: str = DEFAULT_MODEL,
        timeout: float = 120.0,
        seed: int | None = 0,
        session: requests.Session | None = None,
    ):
        url = base_url or os.environ.get(MODEL_URL_ENV)
        if not url:
            raise TransportError(
                f"no model server configured (set {MODEL_URL_ENV} or pass base_url)"
            )
        self.base_url = url
        self.model = model
        self.timeout = timeout
        self.seed = seed
        self.session = session or requests.Session()

    def generate(
        self, vision: str, context: DecisionContext, feedback: list, attempt: int
    ) -> str:
        payload = {
            "model": self.model,
            "prompt": build_prompt(vision, context, feedback, attempt),
            "temperature": 0,
            "stream": False,
        }
        if self.seed is not None:
            payload["seed"] = self.seed
        try:
            resp = self.session.post(self.base_url, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise TransportError(f"model server call failed: {exc}") from exc
        if not isinstance(body, dict) or not isinstance(body.get("response"), str):
            raise TransportError("model server returned an unexpected body shape")
        return body["response"]

"""Proposal parsing, keyword scoring, scripted/faulty backends, model adapter."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_elicit import (
    FaultyBackend,
    KeywordBackend,
    ModelServerBackend,
    ProposalParseError,
    RetryPolicy,
    ScriptedBackend,
    TransportError,
    build_context,
    keyword_propose,
    parse_proposal,
    propose,
)
from lattice_elicit.interpreter import build_prompt
from lattice_elicit.validator import Violation, ViolationKind


class TestParseProposal:
    def test_plain_object(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        raw = '{"selected_ids": ["1.2.2.2"], "rationale": "fall detection"}'
        assert parse_proposal(raw, context) == frozenset({"1.2.2.2"})

    def test_fenced_with_prose(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        raw = 'Sure! ```json {"selected_ids": []}``` hope that helps'
        assert parse_proposal(raw, context) == frozenset()

    def test_no_json_raises(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        with pytest.raises(ProposalParseError):
            parse_proposal("I would pick option A.", context)

    def test_first_matching_object_wins(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        raw = (
            '{"other": 1} {"selected_ids": ["1.2.2.1"]} {"selected_ids": ["1.2.2.2"]}'
        )
        assert parse_proposal(raw, context) == frozenset({"1.2.2.1"})

    def test_out_of_context_ids_are_kept(self, smarthome):
        # Repair is the validator's job; the parser must not silently fix.
        context = build_context(smarthome, "1.2.2")
        raw = '{"selected_ids": ["9.9", "1.2.2.1"]}'
        assert parse_proposal(raw, context) == frozenset({"9.9", "1.2.2.1"})


class TestKeywordPropose:
    def test_fall_detection_fixture(self, smarthome):
        """Hand-computed overlap for the alert-mode decision.

        vision tokens: {elderly, monitoring, with, fall, alerts}
        1.2.2.1 title+statement: no token in common -> 0
        1.2.2.2: {fall, alerts, elderly, monitoring} -> 4
        """
        context = build_context(smarthome, "1.2.2")
        proposal = keyword_propose("elderly monitoring with fall alerts", context)
        assert proposal.selected_ids == frozenset({"1.2.2.2"})
        assert "1.2.2.1=0" in proposal.rationale
        assert "1.2.2.2=4" in proposal.rationale

    def test_zero_overlap_single_adaptor_takes_first(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        proposal = keyword_propose("xyzzy", context)
        assert proposal.selected_ids == frozenset({"1.2.2.1"})

    def test_zero_overlap_multiple_adaptor_takes_first(self, smarthome):
        context = build_context(smarthome, "1.2.1")
        proposal = keyword_propose("xyzzy", context)
        assert proposal.selected_ids == frozenset({"1.2.1.1"})

    def test_zero_overlap_options_take_nothing(self, smarthome):
        context = build_context(smarthome, "1.3")  # option group over 1.3.2
        proposal = keyword_propose("xyzzy", context)
        assert proposal.selected_ids == frozenset()

    @settings(max_examples=25, deadline=None)
    @given(vision=st.text(max_size=120))
    def test_pure_function(self, smarthome, vision):
        context = build_context(smarthome, "1.2.1")
        a = keyword_propose(vision, context)
        b = keyword_propose(vision, context)
        assert a.selected_ids == b.selected_ids
        assert a.raw_output == b.raw_output


class TestPropose:
    def test_scripted_replay(self, smarthome):
        backend = ScriptedBackend({"1.2.2": ["1.2.2.2"]})
        context = build_context(smarthome, "1.2.2")
        proposal = propose(backend, "anything", context, [], 1)
        assert proposal.selected_ids == frozenset({"1.2.2.2"})
        assert proposal.rationale == "scripted"

    def test_attempt_must_be_positive(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        with pytest.raises(ValueError):
            propose(KeywordBackend(), "v", context, [], 0)

    def test_feedback_messages_reach_backend_verbatim(self, smarthome):
        captured = {}

        class Capture:
            def generate(self, vision, context, feedback, attempt):
                captured["feedback"] = feedback
                captured["prompt"] = build_prompt(vision, context, feedback, attempt)
                return '{"selected_ids": []}'

        violations = [
            Violation.at(ViolationKind.XOR_VIOLATION, "1.2.2"),
            Violation.at(ViolationKind.UNKNOWN_ID, "9.9"),
        ]
        context = build_context(smarthome, "1.3")
        propose(Capture(), "v", context, violations, 2)
        assert captured["feedback"] == violations
        for violation in violations:
            assert violation.message in captured["prompt"]


class TestFaultyBackend:
    def test_rate_one_single_adaptor_guarantees_rejection(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        backend = FaultyBackend(fault_rate=1.0, seed=3)
        for attempt in range(1, 6):
            raw = backend.generate("v", context, [], attempt)
            try:
                ids = parse_proposal(raw, context)
            except ProposalParseError:
                continue  # unparseable prose fault: also a failed attempt
            child_ids = {c.id for c in context.children}
            bad_cardinality = len(ids & child_ids) != 1
            ghost = bool(ids - child_ids)
            assert bad_cardinality or ghost

    def test_seeded_reproducibility(self, smarthome):
        context = build_context(smarthome, "1.2.1")
        a = [FaultyBackend(0.7, seed=9).generate("v", context, [], i) for i in range(1, 8)]
        b = [FaultyBackend(0.7, seed=9).generate("v", context, [], i) for i in range(1, 8)]
        assert a == b

    def test_rate_zero_is_clean(self, smarthome):
        context = build_context(smarthome, "1.2.2")
        backend = FaultyBackend(fault_rate=0.0, seed=1)
        raw = backend.generate("elderly monitoring with fall alerts", context, [], 1)
        assert parse_proposal(raw, context) == frozenset({"1.2.2.2"})

    def test_rate_bounds(self):
        with pytest.raises(ValueError):
            FaultyBackend(fault_rate=1.5)


class TestRetryPolicy:
    def test_cap_bounds(self):
        with pytest.raises(ValueError):
            RetryPolicy(retry_cap=0)
        with pytest.raises(ValueError):
            RetryPolicy(on_exhaustion="panic")

    def test_exhaustion_boundary(self):
        policy = RetryPolicy(retry_cap=2)
        assert not policy.exhausted(3)  # initial attempt + 2 retries allowed
        assert policy.exhausted(4)

    def test_unbounded(self):
        assert not RetryPolicy(retry_cap=None).exhausted(10_000)


class TestModelServerBackend:
    class StubSession:
        def __init__(self, response_text='{"selected_ids": []}'):
            self.requests = []
            self.response_text = response_text

        def post(self, url, json=None, timeout=None):
            self.requests.append((url, json))

            class Resp:
                def __init__(self, text):
                    self._text = text

                def raise_for_status(self):
                    pass

                def json(self):
                    return {"response": self._text}

            return Resp(self.response_text)

    def test_wire_shape(self, smarthome):
        stub = self.StubSession('{"selected_ids": ["1.2.2.2"]}')
        backend = ModelServerBackend(base_url="http://localhost:1", session=stub)
        context = build_context(smarthome, "1.2.2")
        proposal = propose(backend, "fall alerts", context, [], 1)
        assert proposal.selected_ids == frozenset({"1.2.2.2"})
        url, payload = stub.requests[0]
        assert url == "http://localhost:1"
        assert payload["temperature"] == 0
        assert payload["stream"] is False
        assert "model" in payload and "prompt" in payload
        assert context.to_prompt_json() in payload["prompt"]

    def test_unconfigured_raises_transport_error(self, monkeypatch):
        monkeypatch.delenv("LATTICE_ELICIT_MODEL_URL", raising=False)
        with pytest.raises(TransportError):
            ModelServerBackend()

    def test_unreachable_server(self, smarthome):
        backend = ModelServerBackend(base_url="http://127.0.0.1:9", timeout=0.2)
        context = build_context(smarthome, "1.2.2")
        with pytest.raises(TransportError):
            backend.generate("v", context, [], 1)

#!/usr/bin/env python3
"""Run the full agent loop autonomously and watch the validator guard it.

Two runs over the same vision: a clean deterministic backend, then a heavily
fault-injected one. Both finish with a structurally valid specification; the
difference shows up only in the rejection counters and the audit trail.

Run from the repo root:  python3 demos/02_autonomous_elicitation.py
"""

import json
import tempfile
from pathlib import Path

from lattice_elicit import (
    FaultyBackend,
    KeywordBackend,
    RetryPolicy,
    compile_spec,
    load_registry,
    run_elicitation,
    validate_global,
)
from lattice_elicit.orchestrator import checkpoint_read

registry = load_registry()
smarthome = registry.get("smarthome")
vision = (
    "We care for an elderly parent living alone at home and want monitoring "
    "with automatic fall detection, safety sensors, and a simple wall panel."
)

workdir = Path(tempfile.mkdtemp(prefix="elicit-demo-"))

# --- clean run -------------------------------------------------------------
audit = workdir / "clean.audit.jsonl"
outcome = run_elicitation(smarthome, vision, KeywordBackend(), audit_path=audit)
print("clean backend:")
print(f"  status={outcome.status.value} selected={len(outcome.final_selection)}")
print(f"  model_calls={outcome.model_calls} rejections={outcome.rejections}")

# --- sabotaged run ----------------------------------------------------------
# Half of all proposals are faulted: wrong XOR cardinality, empty OR picks,
# invented ids, unparseable prose. The validator rejects each one and feeds
# the violation messages back for a revised proposal.
audit2 = workdir / "faulty.audit.jsonl"
outcome2 = run_elicitation(
    smarthome,
    vision,
    FaultyBackend(fault_rate=0.5, seed=7),
    policy=RetryPolicy(retry_cap=5, on_exhaustion="repair"),
    audit_path=audit2,
)
print("\nfaulty backend (fault rate 0.5):")
print(f"  status={outcome2.status.value} selected={len(outcome2.final_selection)}")
print(f"  model_calls={outcome2.model_calls} rejections={outcome2.rejections} "
      f"repairs={outcome2.repairs}")
print(f"  final violations: {validate_global(smarthome, set(outcome2.final_selection))}")

# --- the audit trail --------------------------------------------------------
print("\nfirst rejection in the audit trail:")
for line in audit2.read_text().splitlines():
    record = json.loads(line)
    if record["payload"].get("event") == "rejected":
        for violation in record["payload"]["violations"]:
            print("  ", violation["message"])
        break

# --- the written artifact ----------------------------------------------------
state = checkpoint_read(audit2)
doc = compile_spec(
    smarthome,
    set(outcome2.final_selection),
    outcome2,
    vision=vision,
    provenance=state.provenance,
    timestamp="demo",
)
print("\nspecification header:")
print("\n".join(doc.markdown.splitlines()[:8]))
print(f"\nartifacts under {workdir}")

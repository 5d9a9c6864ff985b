#!/usr/bin/env python3
"""Human-in-the-loop elicitation over the HTTP API.

Drives the session endpoints in-process (no network needed) the same way the
web wizard does: one decision at a time, with the server rejecting anything
the lattice forbids. Submitting both children of a single adaptor shows the
guardrail; the human is simply another untrusted proposal source.

Run from the repo root:  python3 demos/05_interactive_service.py
"""

import tempfile

from fastapi.testclient import TestClient

from lattice_elicit import load_registry, validate_global
from lattice_elicit.service import create_app

registry = load_registry()
client = TestClient(create_app(registry=registry, data_dir=tempfile.mkdtemp()))

# Create a session from a vision: the router picks the family.
created = client.post(
    "/sessions",
    json={"vision": "home safety sensors with fall detection for an elderly parent"},
).json()
session = created["session_id"]
print(f"routed to {created['family_id']}, status: {created['status']}")

answered = 0
misbehaved = False
while True:
    response = client.get(f"/sessions/{session}/question")
    if response.status_code != 200:
        break
    question = response.json()["question"]
    kind = question["decision_kind"]
    children = [c["id"] for c in question["children"]]
    print(f"\nQ: {question['node']['id']} {question['node']['title']} [{kind}]")
    for child in question["children"]:
        print(f"   - {child['id']} {child['title']}")

    if kind == "single_adaptor" and not misbehaved:
        # Misbehave once on purpose: pick both alternatives.
        misbehaved = True
        rejected = client.post(
            f"/sessions/{session}/choice", json={"selected_ids": children[:2]}
        ).json()
        print(f"   submit {children[:2]} -> rejected:")
        for violation in rejected["violations"]:
            print(f"     {violation['message']}")

    pick = children[:1] if kind in ("single_adaptor", "multiple_adaptor") else []
    result = client.post(
        f"/sessions/{session}/choice", json={"selected_ids": pick}
    ).json()
    answered += 1
    print(f"   submit {pick} -> accepted={result['accepted']} next={result['next']}")
    if result["next"] == "completed":
        break

spec = client.get(f"/sessions/{session}/spec").json()
ids = spec["sidecar"]["ids"]
lattice = registry.get(created["family_id"])
print(f"\ncompleted after {answered} answers; {len(ids)} requirements")
print("server-side validation of the final id set:",
      validate_global(lattice, set(ids)) == [])
audit = client.get(f"/sessions/{session}/audit").json()["records"]
print(f"audit trail: {len(audit)} transitions")

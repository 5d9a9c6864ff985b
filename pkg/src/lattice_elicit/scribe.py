"""Compile a validated selection into the final specification document.

The scribe never authors requirement text; it orders and formats what the
validated selection already contains. Output is a Markdown document plus a
machine-readable JSON sidecar, both byte-deterministic given the same inputs
and a pinned timestamp.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import InvalidSelectionError
from .model import Lattice, topological_order
from .orchestrator import RunOutcome
from .validator import validate_global


@dataclass(frozen=True)
class SpecificationDocument:
    markdown: str
    sidecar: dict

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar, indent=2, sort_keys=True) + "\n"


def vision_hash(vision: str) -> str:
    return hashlib.sha256(vision.encode("utf-8")).hexdigest()[:16]


def compile_spec(
    lattice: Lattice,
    selection: set,
    outcome: RunOutcome,
    *,
    vision: str = "",
    provenance: dict | None = None,
    timestamp: str = "unpinned",
) -> SpecificationDocument:
    """Render the selection as a specification document.

    Refuses invalid selections outright: reaching this point with one means
    the loop upstream is broken, so failing loudly beats emitting a document.
    Every selected requirement appears exactly once, parents before children.
    """
    violations = validate_global(lattice, selection)
    if violations:
        raise InvalidSelectionError(
            "selection fails validation: " + "; ".join(v.message for v in violations)
        )
    provenance = provenance or {}

    ordered = [nid for nid in topological_order(lattice) if nid in selection]
    lines = [
        f"# {lattice.family_id} specification",
        "",
        f"- family: {lattice.family_id}",
        f"- vision-sha256: {vision_hash(vision) if vision else 'none'}",
        f"- generated-at: {timestamp}",
        f"- model-calls-used: {outcome.model_calls}",
        f"- repairs: {outcome.repairs}",
        f"- requirements: {len(ordered)}",
        "",
    ]
    for nid in ordered:
        node = lattice.nodes[nid]
        source = provenance.get(nid, "auto-core")
        lines.append(f"## {nid} {node.title}")
        lines.append("")
        lines.append(f"- type: {node.node_type.value}")
        lines.append(f"- decided-by: {source}")
        lines.append("")
        lines.append(node.statement)
        lines.append("")
    markdown = "\n".join(lines)

    sidecar = {
        "family_id": lattice.family_id,
        "vision_sha256": vision_hash(vision) if vision else None,
        "generated_at": timestamp,
        "ids": ordered,
        "provenance": {nid: provenance.get(nid, "auto-core") for nid in ordered},
        "metrics": {
            "status": outcome.status.value,
            "model_calls": outcome.model_calls,
            "repairs": outcome.repairs,
            "transitions": outcome.transitions,
            "rejections": outcome.rejections,
            "violations_encountered": outcome.violations_encountered,
        },
        "violations": [],
    }
    return SpecificationDocument(markdown=markdown, sidecar=sidecar)

"""Requirement lattice domain model: parsing, structural checks, ordering.

A lattice is an immutable DAG of requirement nodes. Each node carries a reuse
category that drives selection constraints downstream:

* ``core``               mandatory wherever it is reachable through selected nodes
* ``single_adaptor``     decision point, exactly one child may be selected (XOR)
* ``multiple_adaptor``   decision point, at least one child must be selected (OR)
* ``option``             freely includable, no cardinality constraint

Lattice values are treated as immutable after construction and are safe to
share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import LatticeParseError, LatticeSchemaError

NodeId = str

_NODE_KEYS = {"id", "type", "title", "statement", "children"}


class NodeType(Enum):
    CORE = "core"
    SINGLE_ADAPTOR = "single_adaptor"
    MULTIPLE_ADAPTOR = "multiple_adaptor"
    OPTION = "option"


#: Node types that open a cardinality decision over their children.
DISCRIMINANT_TYPES = (NodeType.SINGLE_ADAPTOR, NodeType.MULTIPLE_ADAPTOR)


@dataclass(frozen=True)
class RequirementNode:
    id: NodeId
    node_type: NodeType
    title: str
    statement: str
    children: tuple[NodeId, ...] = ()

    @property
    def is_discriminant(self) -> bool:
        return self.node_type in DISCRIMINANT_TYPES


@dataclass(frozen=True)
class SchemaError:
    """One structural finding from check_well_formed; node is None for
    lattice-level findings."""

    node: NodeId | None
    message: str


@dataclass
class Lattice:
    """An application-family requirement lattice (immutable after construction)."""

    family_id: str
    root: NodeId
    nodes: dict[NodeId, RequirementNode]
    description_samples: list[str] = field(default_factory=list)
    # Derived: parent relation, computed once from the child lists.
    parents: dict[NodeId, tuple[NodeId, ...]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        parents: dict[NodeId, list[NodeId]] = {nid: [] for nid in self.nodes}
        for node in self.nodes.values():
            for child in node.children:
                if child in parents:
                    parents[child].append(node.id)
        self.parents = {nid: tuple(ps) for nid, ps in parents.items()}

    def node(self, node_id: NodeId) -> RequirementNode:
        return self.nodes[node_id]

    def parents_of(self, node_id: NodeId) -> tuple[NodeId, ...]:
        return self.parents.get(node_id, ())

    def discriminants(self) -> list[NodeId]:
        return [nid for nid, n in sorted(self.nodes.items()) if n.is_discriminant]

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class LatticeRegistry:
    """Registry of available application families keyed by family_id."""

    families: dict[str, Lattice] = field(default_factory=dict)

    def add(self, lattice: Lattice) -> None:
        if lattice.family_id in self.families:
            raise LatticeSchemaError(f"duplicate family_id: {lattice.family_id}")
        self.families[lattice.family_id] = lattice

    def get(self, family_id: str) -> Lattice:
        return self.families[family_id]

    def family_ids(self) -> list[str]:
        return sorted(self.families)

    def __contains__(self, family_id: str) -> bool:
        return family_id in self.families

    def __len__(self) -> int:
        return len(self.families)


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------


def parse_lattice(document: str) -> Lattice:
    """Parse a UTF-8 JSON lattice document and verify its invariants.

    Raises LatticeParseError for malformed JSON and LatticeSchemaError for
    schema or structural problems (the findings ride on ``.errors``).
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise LatticeParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise LatticeSchemaError("top-level value must be an object")

    for key in ("family_id", "root", "nodes"):
        if key not in data:
            raise LatticeSchemaError(f"missing top-level field: {key}")
    # Unknown top-level keys are ignored on purpose (forward compatibility).

    family_id = data["family_id"]
    root = data["root"]
    raw_nodes = data["nodes"]
    samples = data.get("description_samples", [])
    if not isinstance(family_id, str) or not family_id:
        raise LatticeSchemaError("family_id must be a non-empty string")
    if not isinstance(root, str) or not root:
        raise LatticeSchemaError("root must be a non-empty string")
    if not isinstance(raw_nodes, list):
        raise LatticeSchemaError("nodes must be an array")
    if not isinstance(samples, list) or not all(isinstance(s, str) for s in samples):
        raise LatticeSchemaError("description_samples must be an array of strings")

    nodes: dict[NodeId, RequirementNode] = {}
    for raw in raw_nodes:
        node = _parse_node(raw)
        if node.id in nodes:
            raise LatticeSchemaError(f"duplicate node id: {node.id}")
        nodes[node.id] = node

    lattice = Lattice(
        family_id=family_id, root=root, nodes=nodes, description_samples=list(samples)
    )
    findings = check_well_formed(lattice)
    if findings:
        raise LatticeSchemaError(
            "; ".join(f.message for f in findings), errors=tuple(findings)
        )
    return lattice


def _parse_node(raw: object) -> RequirementNode:
    if not isinstance(raw, dict):
        raise LatticeSchemaError("each node must be an object")
    unknown = set(raw) - _NODE_KEYS
    if unknown:
        raise LatticeSchemaError(f"unknown node keys: {sorted(unknown)}")
    missing = _NODE_KEYS - set(raw)
    if missing:
        raise LatticeSchemaError(f"node missing fields: {sorted(missing)}")
    node_id = raw["id"]
    if not isinstance(node_id, str) or not node_id or any(c.isspace() for c in node_id):
        raise LatticeSchemaError(f"node id must be a non-empty token: {node_id!r}")
    try:
        node_type = NodeType(raw["type"])
    except ValueError:
        raise LatticeSchemaError(f"unknown node_type {raw['type']!r} at node {node_id}")
    children = raw["children"]
    if not isinstance(children, list) or not all(isinstance(c, str) for c in children):
        raise LatticeSchemaError(f"children must be an array of ids at node {node_id}")
    if not isinstance(raw["title"], str) or not isinstance(raw["statement"], str):
        raise LatticeSchemaError(f"title/statement must be strings at node {node_id}")
    return RequirementNode(
        id=node_id,
        node_type=node_type,
        title=raw["title"],
        statement=raw["statement"],
        children=tuple(children),
    )


def serialize_lattice(lattice: Lattice) -> str:
    """Serialize to the canonical document form (nodes sorted by id).

    parse_lattice(serialize_lattice(L)) == L for every well-formed L.
    """
    doc = {
        "family_id": lattice.family_id,
        "root": lattice.root,
        "description_samples": list(lattice.description_samples),
        "nodes": [
            {
                "id": n.id,
                "type": n.node_type.value,
                "title": n.title,
                "statement": n.statement,
                "children": list(n.children),
            }
            for _, n in sorted(lattice.nodes.items())
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def check_well_formed(lattice: Lattice) -> list[SchemaError]:
    """Check every lattice invariant; an empty list means well-formed.

    Findings name the offending node where one exists.
    """
    errors: list[SchemaError] = []
    nodes = lattice.nodes

    if lattice.root not in nodes:
        errors.append(SchemaError(lattice.root, f"unknown root: {lattice.root}"))
        return errors  # nothing else is meaningful without a root

    for nid, node in sorted(nodes.items()):
        seen: set[NodeId] = set()
        for child in node.children:
            if child in seen:
                errors.append(SchemaError(nid, f"duplicate child {child} of {nid}"))
            seen.add(child)
            if child not in nodes:
                errors.append(SchemaError(nid, f"unresolved child {child} of {nid}"))
        if node.is_discriminant and len(node.children) < 2:
            errors.append(
                SchemaError(nid, f"discriminant with < 2 children: {nid}")
            )

    if lattice.parents_of(lattice.root):
        errors.append(SchemaError(lattice.root, f"root has a parent: {lattice.root}"))

    cycle_node = _find_cycle(lattice)
    if cycle_node is not None:
        errors.append(SchemaError(cycle_node, f"cycle through node {cycle_node}"))
        return errors  # reachability is not meaningful on a cyclic graph

    reachable = _reachable_from_root(lattice)
    for nid in sorted(nodes):
        if nid not in reachable:
            errors.append(SchemaError(nid, f"unreachable node: {nid}"))
    return errors


def _find_cycle(lattice: Lattice) -> NodeId | None:
    """Return a node on a cycle, or None. Iterative three-color DFS."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in lattice.nodes}
    for start in lattice.nodes:
        if color[start] != WHITE:
            continue
        stack: list[tuple[NodeId, int]] = [(start, 0)]
        color[start] = GREY
        while stack:
            nid, idx = stack[-1]
            children = lattice.nodes[nid].children
            if idx < len(children):
                stack[-1] = (nid, idx + 1)
                child = children[idx]
                if child not in lattice.nodes:
                    continue
                if color[child] == GREY:
                    return child
                if color[child] == WHITE:
                    color[child] = GREY
                    stack.append((child, 0))
            else:
                color[nid] = BLACK
                stack.pop()
    return None


def _reachable_from_root(lattice: Lattice) -> set[NodeId]:
    seen = {lattice.root}
    stack = [lattice.root]
    while stack:
        nid = stack.pop()
        for child in lattice.nodes[nid].children:
            if child in lattice.nodes and child not in seen:
                seen.add(child)
                stack.append(child)
    return seen


def topological_order(lattice: Lattice) -> list[NodeId]:
    """Deterministic parent-before-child ordering.

    A node becomes ready once all its parents are emitted; ready nodes are
    emitted in discovery order (parent emission order, then child-list
    position), which resolves ties reproducibly.
    """
    emitted: set[NodeId] = set()
    order: list[NodeId] = []
    ready: list[NodeId] = [lattice.root]
    queued = {lattice.root}
    while ready:
        nid = ready.pop(0)
        emitted.add(nid)
        order.append(nid)
        for child in lattice.nodes[nid].children:
            if child in queued or child in emitted:
                continue
            # Multi-parent children become ready on their last parent's turn.
            if all(p in emitted for p in lattice.parents_of(child)):
                ready.append(child)
                queued.add(child)
    return order

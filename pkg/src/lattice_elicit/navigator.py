"""Frontier-based traversal: pick the next decision point, keep context local.

The traversal is a depth-first walk in child-list order. Nodes with no
choice to make (core requirements, and decision points themselves, which are
mandatory once reached) are selected automatically; the interpreter is only
consulted at actual decisions:

* a ``single_adaptor`` or ``multiple_adaptor`` node decides over all its
  children;
* a core/option node with option children decides over those options as one
  grouped decision (cardinality 0..n).

The context handed to the interpreter contains one node and its immediate
decision children only, so its serialized size depends on the branching
factor, never on the lattice size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import Lattice, NodeId, NodeType, RequirementNode

#: Sentinel returned by next_decision when the traversal is exhausted.
DONE = "DONE"


@dataclass
class Frontier:
    """LIFO stack of nodes awaiting expansion plus the already-expanded set."""

    pending: list = field(default_factory=list)  # list[NodeId], top is last
    visited: set = field(default_factory=set)  # set[NodeId]

    def push(self, node_id: NodeId) -> None:
        """Push a node unless already expanded.

        Re-pushing a node that is still pending hoists it to the top: a
        multi-parent node is expanded at its first encounter, matching
        recursive depth-first order.
        """
        if node_id in self.visited:
            return
        if node_id in self.pending:
            self.pending.remove(node_id)
        self.pending.append(node_id)

    def snapshot(self) -> dict:
        return {"pending": list(self.pending), "visited": sorted(self.visited)}


@dataclass(frozen=True)
class DecisionContext:
    """The localized prompt payload: one node plus its decision children."""

    node: RequirementNode
    children: tuple[RequirementNode, ...]
    decision_kind: NodeType

    def to_dict(self) -> dict:
        def node_dict(n: RequirementNode) -> dict:
            return {
                "id": n.id,
                "title": n.title,
                "statement": n.statement,
                "type": n.node_type.value,
            }

        return {
            "node": node_dict(self.node),
            "decision_kind": self.decision_kind.value,
            "children": [node_dict(c) for c in self.children],
        }

    def to_prompt_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False)

    def child_ids(self) -> set:
        return {c.id for c in self.children}


def option_children(lattice: Lattice, node_id: NodeId) -> list[NodeId]:
    node = lattice.nodes[node_id]
    return [
        c for c in node.children if lattice.nodes[c].node_type is NodeType.OPTION
    ]


def mandatory_children(lattice: Lattice, node_id: NodeId) -> list[NodeId]:
    node = lattice.nodes[node_id]
    return [
        c for c in node.children if lattice.nodes[c].node_type is not NodeType.OPTION
    ]


def decision_kind_at(lattice: Lattice, node_id: NodeId) -> NodeType | None:
    """The kind of decision a node opens, or None when it opens none."""
    node = lattice.nodes[node_id]
    if node.is_discriminant:
        return node.node_type
    if option_children(lattice, node_id):
        return NodeType.OPTION
    return None


def decision_child_ids(lattice: Lattice, node_id: NodeId) -> list[NodeId]:
    """The ids the decision at node_id ranges over, in child-list order."""
    node = lattice.nodes[node_id]
    if node.is_discriminant:
        return list(node.children)
    return option_children(lattice, node_id)


def init_frontier(lattice: Lattice) -> Frontier:
    """Fresh traversal state: the root is pending, nothing visited."""
    return Frontier(pending=[lattice.root], visited=set())


def next_decision(frontier: Frontier, lattice: Lattice, selection: set) -> NodeId:
    """Pop until a decision point surfaces; auto-select everything popped.

    Every popped node joins the selection (reaching a node means it is part
    of the chosen region: cores are mandatory, decision points must be
    resolved, options were accepted when their parent's decision passed).
    Nodes without a decision have their children pushed in reverse child-list
    order so the leftmost child is expanded first. Returns the decision node
    id, or DONE when the frontier is exhausted.

    The returned node stays un-visited; resolve it with advance().
    """
    while frontier.pending:
        nid = frontier.pending.pop()
        if nid in frontier.visited:
            continue
        selection.add(nid)
        if decision_kind_at(lattice, nid) is not None:
            return nid
        frontier.visited.add(nid)
        for child in reversed(lattice.nodes[nid].children):
            frontier.push(child)
    return DONE


def build_context(lattice: Lattice, node_id: NodeId) -> DecisionContext:
    """Localized decision context: the node and its immediate decision children."""
    kind = decision_kind_at(lattice, node_id)
    if kind is None:
        kind = lattice.nodes[node_id].node_type
    children = tuple(
        lattice.nodes[c] for c in decision_child_ids(lattice, node_id)
    )
    return DecisionContext(
        node=lattice.nodes[node_id], children=children, decision_kind=kind
    )


def advance(
    frontier: Frontier,
    node_id: NodeId,
    accepted_children: set,
    lattice: Lattice,
) -> None:
    """Resolve the decision at node_id: mark it visited and push what follows.

    accepted_children must be a subset of the node's decision children and
    must already have passed validation; a breach is a programming error.
    Accepted children are pushed in reverse child-list order (left-first
    DFS); rejected alternatives are pruned for good. For core/option nodes
    the non-option children are mandatory and are pushed as well.
    """
    allowed = set(decision_child_ids(lattice, node_id))
    if not accepted_children <= allowed:
        raise RuntimeError(
            f"advance at {node_id}: accepted ids {sorted(accepted_children - allowed)} "
            "are not decision children; caller skipped validation"
        )
    frontier.visited.add(node_id)
    node = lattice.nodes[node_id]
    if node.is_discriminant:
        to_push = [c for c in node.children if c in accepted_children]
    else:
        to_push = [
            c
            for c in node.children
            if lattice.nodes[c].node_type is not NodeType.OPTION
            or c in accepted_children
        ]
    for child in reversed(to_push):
        frontier.push(child)

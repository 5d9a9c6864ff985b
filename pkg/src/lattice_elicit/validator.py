"""Deterministic symbolic validation of requirement selections.

This module is the structural gatekeeper: every rule here is a pure function
of the lattice and the selection set. It has no dependency on any interpreter
backend, by construction, so no heuristic can sneak past it.

The global consistency predicate holds for a selection S when:

* every selected single_adaptor has exactly one selected child,
* every selected multiple_adaptor has at least one selected child,
* every selected non-root node has at least one selected parent,
* every core node forced by the selected region is itself selected.

A selection is *complete* when additionally no decision point reachable
through the selected region remains unresolved.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .errors import LatticeTooLargeError
from .model import Lattice, NodeId, NodeType

SelectionSet = set  # set[NodeId]; validation never mutates its argument

ENUMERATION_CAP = 20


class ViolationKind(Enum):
    XOR_VIOLATION = "XorViolation"
    OR_VIOLATION = "OrViolation"
    ORPHANED_NODE = "OrphanedNode"
    MISSING_CORE = "MissingCore"
    UNKNOWN_ID = "UnknownId"


# Fixed message templates keyed by kind, so logs diff cleanly.
_MESSAGES = {
    ViolationKind.XOR_VIOLATION: "Violation: Multiple children selected for XOR node {id}",
    ViolationKind.OR_VIOLATION: "OR Violation at {id}",
    ViolationKind.ORPHANED_NODE: "Orphaned Node: {id}",
    ViolationKind.MISSING_CORE: "Missing core requirement: {id}",
    ViolationKind.UNKNOWN_ID: "Unknown requirement id: {id}",
}

_KIND_ORDER = {kind: i for i, kind in enumerate(ViolationKind)}


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    node: NodeId
    message: str

    @classmethod
    def at(cls, kind: ViolationKind, node: NodeId) -> "Violation":
        return cls(kind=kind, node=node, message=_MESSAGES[kind].format(id=node))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "node": self.node, "message": self.message}

    @classmethod
    def from_dict(cls, data: dict) -> "Violation":
        return cls(
            kind=ViolationKind(data["kind"]),
            node=data["node"],
            message=data["message"],
        )


def _ordered(violations) -> list[Violation]:
    unique = {(v.kind, v.node): v for v in violations}
    return [
        unique[key]
        for key in sorted(unique, key=lambda k: (_KIND_ORDER[k[0]], k[1]))
    ]


def _unknown_ids(lattice: Lattice, selection: SelectionSet) -> list[Violation]:
    return [
        Violation.at(ViolationKind.UNKNOWN_ID, nid)
        for nid in sorted(selection)
        if nid not in lattice.nodes
    ]


def _orphans(lattice: Lattice, selection: SelectionSet) -> list[Violation]:
    out = []
    for nid in sorted(selection):
        if nid not in lattice.nodes or nid == lattice.root:
            continue
        if not any(p in selection for p in lattice.parents_of(nid)):
            out.append(Violation.at(ViolationKind.ORPHANED_NODE, nid))
    return out


def _cardinality(lattice: Lattice, selection: SelectionSet, nid: NodeId) -> list[Violation]:
    node = lattice.nodes[nid]
    chosen = sum(1 for c in node.children if c in selection)
    if node.node_type is NodeType.SINGLE_ADAPTOR and chosen != 1:
        return [Violation.at(ViolationKind.XOR_VIOLATION, nid)]
    if node.node_type is NodeType.MULTIPLE_ADAPTOR and chosen < 1:
        return [Violation.at(ViolationKind.OR_VIOLATION, nid)]
    return []


def forced_core_nodes(lattice: Lattice, selection: SelectionSet) -> set:
    """Least fixpoint of core forcing.

    The root is forced when it is core; a core node is forced when any of its
    non-discriminant parents is selected or forced. Children of discriminants
    are governed by the cardinality rules instead, never by forcing.
    """
    forced: set = set()
    changed = True
    while changed:
        changed = False
        for nid, node in lattice.nodes.items():
            if node.node_type is not NodeType.CORE or nid in forced:
                continue
            if nid == lattice.root:
                forced.add(nid)
                changed = True
                continue
            for pid in lattice.parents_of(nid):
                parent = lattice.nodes[pid]
                if parent.is_discriminant:
                    continue
                if pid in selection or pid in forced:
                    forced.add(nid)
                    changed = True
                    break
    return forced


def validate_node(lattice: Lattice, selection: SelectionSet, node: NodeId) -> list[Violation]:
    """Per-transition validation of one decision node.

    Checks the node's XOR/OR cardinality unconditionally, then sweeps the
    whole selection for orphaned and unknown ids. Pure; output order is
    deterministic (kind, then node id).
    """
    if node not in lattice.nodes:
        raise KeyError(f"node {node} not in lattice {lattice.family_id}")
    found = list(_cardinality(lattice, selection, node))
    found.extend(_orphans(lattice, selection))
    found.extend(_unknown_ids(lattice, selection))
    return _ordered(found)


def validate_global(lattice: Lattice, selection: SelectionSet) -> list[Violation]:
    """Full consistency check of a selection; empty result means valid.

    Cardinality is evaluated for discriminants that are themselves selected;
    requiring resolution of unreached decision branches would make most
    lattices unsatisfiable.
    """
    found: list[Violation] = []
    found.extend(_unknown_ids(lattice, selection))
    for nid in sorted(selection):
        if nid in lattice.nodes and lattice.nodes[nid].is_discriminant:
            found.extend(_cardinality(lattice, selection, nid))
    found.extend(_orphans(lattice, selection))
    for nid in sorted(forced_core_nodes(lattice, selection) - set(selection)):
        found.append(Violation.at(ViolationKind.MISSING_CORE, nid))
    return _ordered(found)


def pending_decisions(lattice: Lattice, selection: SelectionSet) -> list[NodeId]:
    """Decision points reachable through the selected region but unresolved.

    An unselected discriminant is pending when it is the root or has a
    selected non-discriminant parent (a mandatory edge into it). Unchosen
    alternatives under a discriminant are never pending.
    """
    pending = []
    for nid, node in sorted(lattice.nodes.items()):
        if not node.is_discriminant or nid in selection:
            continue
        if nid == lattice.root:
            pending.append(nid)
            continue
        for pid in lattice.parents_of(nid):
            parent = lattice.nodes[pid]
            if pid in selection and not parent.is_discriminant:
                pending.append(nid)
                break
    return pending


def is_complete(lattice: Lattice, selection: SelectionSet) -> bool:
    """True when the selection is valid and no reachable decision is open."""
    if validate_global(lattice, selection):
        return False
    return not pending_decisions(lattice, selection)


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------


def enumerate_valid(lattice: Lattice, max_nodes: int = ENUMERATION_CAP) -> list[frozenset]:
    """All valid-and-complete selections, by pruned exhaustive enumeration.

    Deliberately naive: this exists as an oracle for tests and gold-standard
    legality checks, not as a configuration engine. Nodes are decided one by
    one in topological order; a branch is pruned as soon as the partial
    assignment can no longer extend to any valid complete selection. Results
    are deterministic (sorted-tuple order).
    """
    if len(lattice.nodes) > max_nodes:
        raise LatticeTooLargeError(
            f"{len(lattice.nodes)} nodes exceeds enumeration cap {max_nodes}"
        )

    from .model import topological_order

    order = topological_order(lattice)
    position = {nid: i for i, nid in enumerate(order)}
    results: list[frozenset] = []
    chosen: set = set()

    def violates_now(nid: NodeId, include: bool) -> bool:
        node = lattice.nodes[nid]
        if include:
            # Orphan: all parents are already decided (topological order).
            if nid != lattice.root and lattice.parents_of(nid):
                if not any(p in chosen for p in lattice.parents_of(nid)):
                    return True
            # A second selected child of a selected single_adaptor parent can
            # never be repaired later.
            for pid in lattice.parents_of(nid):
                parent = lattice.nodes[pid]
                if (
                    parent.node_type is NodeType.SINGLE_ADAPTOR
                    and pid in chosen
                    and any(c in chosen for c in parent.children)
                ):
                    return True
        else:
            # Forced inclusions: core under a selected non-discriminant
            # parent; pending decision points; a core root.
            if node.node_type is NodeType.CORE:
                if nid == lattice.root:
                    return True
                for pid in lattice.parents_of(nid):
                    if pid in chosen and not lattice.nodes[pid].is_discriminant:
                        return True
            if node.is_discriminant:
                if nid == lattice.root:
                    return True
                for pid in lattice.parents_of(nid):
                    if pid in chosen and not lattice.nodes[pid].is_discriminant:
                        return True
        return False

    def children_decided_ok(nid: NodeId) -> bool:
        """Once the last child of a selected discriminant is decided, its
        cardinality is final and checkable."""
        for pid in lattice.parents_of(nid):
            parent = lattice.nodes[pid]
            if not parent.is_discriminant or pid not in chosen:
                continue
            if all(position[c] <= position[nid] for c in parent.children):
                count = sum(1 for c in parent.children if c in chosen)
                if parent.node_type is NodeType.SINGLE_ADAPTOR and count != 1:
                    return False
                if parent.node_type is NodeType.MULTIPLE_ADAPTOR and count < 1:
                    return False
        return True

    def walk(idx: int) -> None:
        if idx == len(order):
            candidate = frozenset(chosen)
            # The pruning rules above are conservative; confirm with the full
            # predicate before recording.
            if not validate_global(lattice, candidate) and is_complete(lattice, candidate):
                results.append(candidate)
            return
        nid = order[idx]
        node = lattice.nodes[nid]
        # Selected discriminants with no children decided yet need their own
        # cardinality check deferred to children_decided_ok; leaf
        # discriminants cannot occur (schema requires >= 2 children).
        for include in (True, False):
            if violates_now(nid, include):
                continue
            if include:
                chosen.add(nid)
            if children_decided_ok(nid):
                walk(idx + 1)
            if include:
                chosen.discard(nid)

    walk(0)
    return sorted(results, key=lambda s: tuple(sorted(s)))


def brute_force_valid(lattice: Lattice, max_nodes: int = 16) -> list[frozenset]:
    """Unpruned power-set sweep; only usable on very small lattices."""
    if len(lattice.nodes) > max_nodes:
        raise LatticeTooLargeError(
            f"{len(lattice.nodes)} nodes exceeds brute-force cap {max_nodes}"
        )
    ids = sorted(lattice.nodes)
    out = []
    for r in range(len(ids) + 1):
        for combo in combinations(ids, r):
            s = frozenset(combo)
            if not validate_global(lattice, set(s)) and is_complete(lattice, set(s)):
                out.append(s)
    return sorted(out, key=lambda s: tuple(sorted(s)))

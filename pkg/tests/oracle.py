"""Independent reference semantics for tests.

Everything here is written as a naive, direct transcription of the selection
rules, deliberately sharing no code with lattice_elicit.validator or
lattice_elicit.navigator: node relations are recomputed by scanning the node
table, and set logic is spelled out longhand. Slow on purpose.
"""

from __future__ import annotations

from itertools import combinations

SA = "single_adaptor"
MA = "multiple_adaptor"
CORE = "core"
OPTION = "option"


def _type(lattice, nid: str) -> str:
    return lattice.nodes[nid].node_type.value


def _parents(lattice, nid: str) -> list:
    return [p for p, node in lattice.nodes.items() if nid in node.children]


def oracle_valid(lattice, selection: set) -> bool:
    """Direct transcription of the structural-validity conjunction."""
    for nid in selection:
        if nid not in lattice.nodes:
            return False

    # Discriminant cardinality for every selected node (exactly one child of
    # a single adaptor; at least one child of a multiple adaptor).
    for nid in selection:
        node = lattice.nodes[nid]
        count = 0
        for child in node.children:
            if child in selection:
                count = count + 1
        if _type(lattice, nid) == SA and count != 1:
            return False
        if _type(lattice, nid) == MA and count < 1:
            return False

    # Parent closure: every selected non-root node has a selected parent.
    for nid in selection:
        if nid == lattice.root:
            continue
        has_selected_parent = False
        for p in _parents(lattice, nid):
            if p in selection:
                has_selected_parent = True
        if not has_selected_parent:
            return False

    # Core completeness: a core node reachable over mandatory edges from the
    # selected-or-required region must itself be selected.
    required = _required_cores(lattice, selection)
    for nid in required:
        if nid not in selection:
            return False
    return True


def _required_cores(lattice, selection: set) -> set:
    required: set = set()
    while True:
        member = set()
        for nid in selection:
            member.add(nid)
        for nid in required:
            member.add(nid)
        grown = set(required)
        for nid in lattice.nodes:
            if _type(lattice, nid) != CORE or nid in grown:
                continue
            if nid == lattice.root:
                grown.add(nid)
                continue
            for p in _parents(lattice, nid):
                if p in member and _type(lattice, p) not in (SA, MA):
                    grown.add(nid)
                    break
        if grown == required:
            return required
        required = grown


def oracle_complete(lattice, selection: set) -> bool:
    """Valid, and no decision point in the selected region is unresolved."""
    if not oracle_valid(lattice, selection):
        return False
    for nid in lattice.nodes:
        if _type(lattice, nid) not in (SA, MA):
            continue
        if nid in selection:
            continue
        if nid == lattice.root:
            return False
        for p in _parents(lattice, nid):
            if p in selection and _type(lattice, p) not in (SA, MA):
                return False
    return True


def oracle_verdict(lattice, selection: set) -> bool:
    return oracle_valid(lattice, selection) and oracle_complete(lattice, selection)


def oracle_all_valid(lattice) -> set:
    """Every valid complete selection, by unpruned power-set sweep."""
    ids = sorted(lattice.nodes)
    found = set()
    for r in range(len(ids) + 1):
        for combo in combinations(ids, r):
            if oracle_verdict(lattice, set(combo)):
                found.add(frozenset(combo))
    return found


# ---------------------------------------------------------------------------
# Reference traversal
# ---------------------------------------------------------------------------


def first_child_chooser(lattice, nid: str, candidates: list) -> set:
    """Mirror of the minimal valid selection rule used by offline backends."""
    if _type(lattice, nid) in (SA, MA):
        return {candidates[0]}
    return set()


def reference_walk(lattice, chooser=first_child_chooser):
    """Recursive depth-first reference traversal.

    Returns (decision sequence, selected ids). Decisions occur at
    single/multiple adaptors and at nodes with option children; chooser maps
    (lattice, node, candidates) to the accepted subset.
    """
    decisions: list = []
    selected: set = set()
    seen: set = set()

    def visit(nid: str) -> None:
        if nid in seen:
            return
        seen.add(nid)
        selected.add(nid)
        node = lattice.nodes[nid]
        if _type(lattice, nid) in (SA, MA):
            decisions.append(nid)
            accepted = chooser(lattice, nid, list(node.children))
            for child in node.children:
                if child in accepted:
                    selected.add(child)
                    visit(child)
            return
        options = [c for c in node.children if _type(lattice, c) == OPTION]
        accepted = set()
        if options:
            decisions.append(nid)
            accepted = chooser(lattice, nid, options)
        for child in node.children:
            if _type(lattice, child) != OPTION or child in accepted:
                if child in accepted:
                    selected.add(child)
                visit(child)

    visit(lattice.root)
    return decisions, selected

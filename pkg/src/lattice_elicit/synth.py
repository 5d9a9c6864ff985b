"""Seeded synthetic lattice generation for tests and scale experiments.

Generated lattices are always well-formed. Node ids, titles and statements
are fixed-width, and every decision (single/multiple adaptor or option
group) ranges over exactly ``branching`` children, so a decision context
serialized from a 1000-node lattice occupies exactly as many bytes as one
from a 20-node lattice with the same branching factor; that property is what
the context-locality experiments measure.
"""

from __future__ import annotations

import random

from .model import Lattice, NodeType, RequirementNode


def _node(idx: int, node_type: NodeType, children=()) -> RequirementNode:
    return RequirementNode(
        id=f"n{idx:05d}",
        node_type=node_type,
        title=f"requirement {idx:05d}",
        statement=f"synthetic requirement statement body {idx:05d}",
        children=tuple(children),
    )


def generate_lattice(
    n_nodes: int,
    branching: int = 3,
    seed: int = 0,
    family_id: str = "synthetic",
    extra_edges: int = 0,
) -> Lattice:
    """Grow a random well-formed lattice of exactly n_nodes nodes.

    Each growth step attaches one batch of children to a leaf core node:
    a single core child, a discriminant with ``branching`` core alternatives,
    ``branching`` option leaves, or a fan of core children. extra_edges adds
    that many additional core-to-core edges (multi-parent DAG shape) placed
    where they cannot interfere with cardinality or forcing rules.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    if branching < 2:
        raise ValueError("branching must be >= 2 (discriminants need choices)")
    rng = random.Random(seed)

    nodes: dict[str, RequirementNode] = {}
    counter = 0

    def alloc(node_type: NodeType, children=()) -> str:
        nonlocal counter
        node = _node(counter, node_type, children)
        nodes[node.id] = node
        counter += 1
        return node.id

    def add_children(parent_id: str, children) -> None:
        parent = nodes[parent_id]
        nodes[parent_id] = RequirementNode(
            id=parent.id,
            node_type=parent.node_type,
            title=parent.title,
            statement=parent.statement,
            children=parent.children + tuple(children),
        )

    root_id = alloc(NodeType.CORE)
    expandable = [root_id]  # core leaves that may still receive one batch

    while counter < n_nodes:
        parent_id = expandable.pop(rng.randrange(len(expandable)))
        remaining = n_nodes - counter
        shapes = ["core_chain"]
        if remaining >= 1 + branching:
            shapes += ["single_adaptor", "multiple_adaptor", "core_fan"]
        # An option batch adds no expandable cores; avoid dead-ending the
        # growth unless it finishes the lattice exactly.
        if remaining >= branching and (expandable or remaining == branching):
            shapes.append("options")
        shape = rng.choice(shapes)

        if shape == "core_chain":
            child = alloc(NodeType.CORE)
            add_children(parent_id, [child])
            expandable.append(child)
        elif shape in ("single_adaptor", "multiple_adaptor"):
            kind = (
                NodeType.SINGLE_ADAPTOR
                if shape == "single_adaptor"
                else NodeType.MULTIPLE_ADAPTOR
            )
            disc = alloc(kind)
            alternatives = [alloc(NodeType.CORE) for _ in range(branching)]
            add_children(disc, alternatives)
            add_children(parent_id, [disc])
            expandable.extend(alternatives)
        elif shape == "options":
            options = [alloc(NodeType.OPTION) for _ in range(branching)]
            add_children(parent_id, options)
        else:  # core_fan
            fan = [alloc(NodeType.CORE) for _ in range(min(branching, remaining))]
            add_children(parent_id, fan)
            expandable.extend(fan)

    # Multi-parent edges, from an earlier core to a later core (acyclic by
    # construction: tree children always have higher ids). Targets must not
    # be discriminant alternatives; forcing an alternative from the side
    # would fight the XOR/OR cardinality of its discriminant parent.
    if extra_edges:
        discriminant_children: set = set()
        for n in nodes.values():
            if n.is_discriminant:
                discriminant_children.update(n.children)
        sources = [
            nid for nid, n in sorted(nodes.items())
            if n.node_type is NodeType.CORE
        ]
        targets = [
            nid for nid in sources
            if nid != root_id and nid not in discriminant_children
        ]
        for _ in range(extra_edges):
            if not sources or not targets:
                break
            b = rng.choice(targets)
            earlier = [a for a in sources if a < b and b not in nodes[a].children]
            if not earlier:
                continue
            add_children(rng.choice(earlier), [b])

    return Lattice(
        family_id=family_id,
        root=root_id,
        nodes=nodes,
        description_samples=[f"synthetic family {family_id}"],
    )

#!/usr/bin/env python3
"""Walk through the domain model: load a requirement lattice, inspect its
structure, and watch the symbolic validator accept and reject selections.

Run from the repo root:  python3 demos/01_lattice_and_validator.py
"""

from lattice_elicit import (
    enumerate_valid,
    is_complete,
    load_registry,
    topological_order,
    validate_global,
    validate_node,
)

registry = load_registry()
smarthome = registry.get("smarthome")

# A lattice is a DAG of requirement nodes, each with a reuse category.
print(f"family: {smarthome.family_id}, nodes: {len(smarthome)}")
for nid in topological_order(smarthome)[:8]:
    node = smarthome.nodes[nid]
    print(f"  {nid:10s} [{node.node_type.value:17s}] {node.title}")
print("  ...")

# The empty selection is invalid: the core root is mandatory.
print("\nvalidate_global({}):")
for violation in validate_global(smarthome, set()):
    print("  ", violation.message)

# Selecting both alternatives of a single adaptor trips the XOR rule.
greedy = {"1", "1.1", "1.1.1", "1.1.1.1", "1.1.1.2"}
print("\nvalidate_node with both network protocols selected:")
for violation in validate_node(smarthome, greedy, "1.1.1"):
    print("  ", violation.message)

# A child without its parent is orphaned; an id the lattice has never heard
# of is flagged rather than silently dropped.
stray = {"1", "1.2.2.2", "42.answer"}
print("\nvalidate_global with a stray child and a made-up id:")
for violation in validate_global(smarthome, stray):
    print("  ", violation.message)

# A well-formed configuration passes both validity and completeness.
config = {
    "1", "1.1", "1.1.1", "1.1.1.1",
    "1.2", "1.2.1", "1.2.1.2", "1.2.2", "1.2.2.1",
    "1.3", "1.3.1", "1.3.1.1",
}
print("\na full configuration:")
print("  violations:", validate_global(smarthome, config))
print("  complete:  ", is_complete(smarthome, config))

# The exhaustive oracle enumerates every legal configuration of a small
# lattice; the decision structure makes the count predictable:
# 2 protocols x 7 sensor subsets x 2 alert modes x 2 interfaces
# x 2 voice options x 3 energy shapes = 336.
configs = enumerate_valid(smarthome)
print(f"\nenumerate_valid: {len(configs)} legal configurations")
print("smallest:", sorted(min(configs, key=len)))

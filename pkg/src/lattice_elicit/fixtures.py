"""Bundled application families and the benchmark suite that ships with them."""

from __future__ import annotations

from importlib import resources

from .model import Lattice, LatticeRegistry, parse_lattice

BUNDLED_FAMILIES = ("erecordkeeping", "smarthome")


def fixture_text(name: str) -> str:
    return (
        resources.files("lattice_elicit").joinpath("fixtures", name).read_text("utf-8")
    )


def load_family(family_id: str) -> Lattice:
    return parse_lattice(fixture_text(f"{family_id}.json"))


def load_registry() -> LatticeRegistry:
    """The default registry: every bundled application family."""
    registry = LatticeRegistry()
    for family_id in BUNDLED_FAMILIES:
        registry.add(load_family(family_id))
    return registry


def bench_suite_text() -> str:
    return fixture_text("bench_suite.json")

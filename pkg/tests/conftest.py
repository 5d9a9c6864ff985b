from __future__ import annotations

import json
from pathlib import Path

import pytest

from lattice_elicit import load_registry, load_suite, parse_lattice
from lattice_elicit.fixtures import bench_suite_text

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def registry():
    return load_registry()


@pytest.fixture(scope="session")
def smarthome(registry):
    return registry.get("smarthome")


@pytest.fixture(scope="session")
def erecordkeeping(registry):
    return registry.get("erecordkeeping")


@pytest.fixture(scope="session")
def oracle12():
    return parse_lattice((DATA_DIR / "oracle12.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def bench_cases(registry):
    return load_suite(bench_suite_text(), registry)


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / name


def read_golden(name: str) -> str:
    return golden_path(name).read_text("utf-8")


def read_golden_json(name: str):
    return json.loads(read_golden(name))

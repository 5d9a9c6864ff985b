#!/usr/bin/env python3
"""Reproduce the benchmark protocol on the bundled suite.

Ten visions (five per family, three with gold standards) are routed, run
through the loop, and scored as binary classification over requirement ids.
Exact match is deliberately strict; many distinct configurations are legal,
so F1 is the primary signal and moderate values are expected.

Run from the repo root:  python3 demos/04_benchmark.py
"""

from lattice_elicit import (
    FaultyBackend,
    KeywordBackend,
    RetryPolicy,
    emit_report,
    load_registry,
    load_suite,
    run_benchmark,
)
from lattice_elicit.fixtures import bench_suite_text

registry = load_registry()
suite = load_suite(bench_suite_text(), registry)
print(f"{len(suite)} cases, golds: {[c.case_id for c in suite if c.gold]}\n")

# Deterministic offline backend: zero violations by construction.
results = run_benchmark(suite, KeywordBackend, registry)
markdown, csv_text = emit_report(results)
print(markdown)

# The same suite under heavy fault injection: every run still completes and
# every final specification is violation-free; only the rejection counters
# (the Viol. column) reveal the sabotage.
seeds = iter(range(1000))
faulty_results = run_benchmark(
    suite,
    lambda: FaultyBackend(fault_rate=0.5, seed=next(seeds)),
    registry,
    policy=RetryPolicy(retry_cap=5, on_exhaustion="repair"),
)
markdown2, _ = emit_report(faulty_results)
print("with fault injection (rate 0.5):\n")
print(markdown2)

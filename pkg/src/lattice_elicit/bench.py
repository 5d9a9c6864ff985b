"""Benchmark harness: visions and gold standards in, metric tables out.

Selection quality is scored as a binary classification over requirement ids
(precision / recall / F1 plus exact match). Exact match is deliberately
strict and expected to be rare: option and multiple-adaptor nodes permit
many legitimate configurations, so F1 is the primary signal.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

from .interpreter import RetryPolicy
from .model import LatticeRegistry
from .orchestrator import RunBudget, RunOutcome, run_elicitation
from .router import build_centroids, route
from .validator import validate_global


@dataclass(frozen=True)
class VisionCase:
    case_id: str
    family_id: str | None
    vision: str
    gold: frozenset | None = None


@dataclass
class BenchResult:
    case_id: str
    family_id: str
    precision: float | None
    recall: float | None
    f1: float | None
    exact_match: bool | None
    violations: int
    model_calls: int
    latency: float
    status: str
    error: str | None = None
    outcome: RunOutcome | None = field(default=None, repr=False, compare=False)


def prf1(selected: set, gold: set) -> tuple[float, float, float, bool]:
    """Precision, recall, F1 and exact match of a selection against gold.

    Empty-set conventions: precision is 1 when both sets are empty and 0 when
    only the selection is empty; recall mirrors this for gold. F1 is computed
    from counts (2*TP / (|S|+|G|)), which makes F1 == P exact whenever P == R,
    and is defined as 0 when P+R == 0.
    """
    selected = set(selected)
    gold = set(gold)
    tp = len(selected & gold)
    if selected:
        precision = tp / len(selected)
    else:
        precision = 1.0 if not gold else 0.0
    if gold:
        recall = tp / len(gold)
    else:
        recall = 1.0 if not selected else 0.0
    if precision + recall == 0.0:
        f1 = 0.0
    elif selected or gold:
        f1 = 2 * tp / (len(selected) + len(gold))
    else:
        f1 = 1.0  # both empty: P = R = 1
    return precision, recall, f1, selected == gold


def load_suite(text: str, registry: LatticeRegistry) -> list[VisionCase]:
    """Parse a benchmark suite file and check gold-standard legality.

    Gold standards must themselves be valid selections of their lattice;
    shipping an illegal gold would poison every score computed from it.
    """
    raw = json.loads(text)
    cases = []
    for item in raw:
        gold = frozenset(item["gold"]) if item.get("gold") else None
        case = VisionCase(
            case_id=item["case_id"],
            family_id=item.get("family_id"),
            vision=item["vision"],
            gold=gold,
        )
        if gold is not None:
            if not case.family_id:
                raise ValueError(f"{case.case_id}: gold requires a pinned family_id")
            lattice = registry.get(case.family_id)
            violations = validate_global(lattice, set(gold))
            if violations:
                raise ValueError(
                    f"{case.case_id}: gold standard is not a legal selection: "
                    + "; ".join(v.message for v in violations)
                )
        cases.append(case)
    return cases


def run_benchmark(
    suite: list[VisionCase],
    backend_factory,
    registry: LatticeRegistry,
    budget_factory=None,
    policy: RetryPolicy | None = None,
) -> list[BenchResult]:
    """Run every case; failures are recorded per case, never raised.

    backend_factory is called once per case (fault-injecting backends carry
    RNG state, so cases must not share one). budget_factory likewise returns
    a fresh RunBudget per case.
    """
    policy = policy or RetryPolicy()
    centroids = build_centroids(registry)
    results = []
    for case in suite:
        start = time.monotonic()
        try:
            family_id = case.family_id or route(case.vision, centroids)
            lattice = registry.get(family_id)
            budget = budget_factory() if budget_factory else RunBudget()
            outcome = run_elicitation(
                lattice, case.vision, backend_factory(), budget=budget, policy=policy
            )
            if case.gold is not None:
                p, r, f1, exact = prf1(set(outcome.final_selection), set(case.gold))
            else:
                p = r = f1 = exact = None
            results.append(
                BenchResult(
                    case_id=case.case_id,
                    family_id=family_id,
                    precision=p,
                    recall=r,
                    f1=f1,
                    exact_match=exact,
                    violations=outcome.violations_encountered,
                    model_calls=outcome.model_calls,
                    latency=outcome.duration,
                    status=outcome.status.value,
                    outcome=outcome,
                )
            )
        except Exception as exc:  # per-case isolation is the contract
            results.append(
                BenchResult(
                    case_id=case.case_id,
                    family_id=case.family_id or "?",
                    precision=None,
                    recall=None,
                    f1=None,
                    exact_match=None,
                    violations=0,
                    model_calls=0,
                    latency=time.monotonic() - start,
                    status="error",
                    error=str(exc),
                )
            )
    return sorted(results, key=lambda r: r.case_id)


_COLUMNS = ["Family", "Vision ID", "Prec.", "Rec.", "F1", "Exact", "Viol.", "Lat. (s)"]


def _fmt(value, places: int = 3) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{places}f}"
    return str(value)


def emit_report(results: list[BenchResult]) -> tuple[str, str]:
    """Markdown table plus CSV twin, fixed 3-decimal formatting.

    Returns (markdown, csv_text). Identical results produce byte-identical
    reports.
    """
    lines = [
        "| " + " | ".join(_COLUMNS) + " |",
        "|" + "|".join("---" for _ in _COLUMNS) + "|",
    ]
    rows = []
    for r in results:
        row = [
            r.family_id,
            r.case_id,
            _fmt(r.precision),
            _fmt(r.recall),
            _fmt(r.f1),
            _fmt(r.exact_match),
            str(r.violations),
            _fmt(r.latency),
        ]
        rows.append(row)
        lines.append("| " + " | ".join(row) + " |")

    completed = sum(1 for r in results if r.status == "completed")
    total_violations = sum(r.violations for r in results)
    mean_calls = (
        sum(r.model_calls for r in results) / len(results) if results else 0.0
    )
    lines.append("")
    lines.append(f"- completion: {completed}/{len(results)}")
    lines.append(f"- total violations: {total_violations}")
    lines.append(f"- mean model calls: {mean_calls:.1f}")
    markdown = "\n".join(lines) + "\n"

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["family", "vision_id", "precision", "recall", "f1", "exact",
         "violations", "latency_s"]
    )
    for row in rows:
        writer.writerow(row)
    return markdown, buf.getvalue()

"""Answer-quality metrics and rater-agreement statistics.

ROUGE-L here is the simplest reproducible variant: whole answers, lowercased
whitespace tokens, no stemming, no stopword removal, single reference.
Learned scorers are reached only through the :class:`ExternalScorer`
interface, never reimplemented.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import requests

from .errors import (
    ConstantInput,
    DegenerateLabels,
    EmptyReference,
    MalformedResponse,
    NetworkError,
)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    n: int


def lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length, O(|a|*|b|) with two rows."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """ROUGE-L precision/recall/F1 (beta=1) over lowercased whitespace tokens."""
    ref_tokens = reference.lower().split()
    if not ref_tokens:
        raise EmptyReference("reference tokenizes to nothing")
    cand_tokens = candidate.lower().split()
    if not cand_tokens:
        return RougeScore(precision=0.0, recall=0.0, f1=0.0)
    lcs = lcs_len(cand_tokens, ref_tokens)
    precision = lcs / len(cand_tokens)
    recall = lcs / len(ref_tokens)
    if precision + recall == 0:
        return RougeScore(precision=0.0, recall=0.0, f1=0.0)
    f1 = 2 * precision * recall / (precision + recall)
    return RougeScore(precision=precision, recall=recall, f1=f1)


def cohens_kappa(a: Sequence, b: Sequence) -> float:
    """Chance-corrected agreement between two raters over the same items."""
    if len(a) != len(b):
        raise ValueError("label lists must have equal length")
    if not a:
        raise ValueError("label lists must be non-empty")
    n = len(a)
    observed = sum(1 for x, y in zip(a, b) if x == y) / n
    labels = set(a) | set(b)
    expected = 0.0
    for label in labels:
        pa = sum(1 for x in a if x == label) / n
        pb = sum(1 for y in b if y == label) / n
        expected += pa * pb
    if expected == 1.0:
        raise DegenerateLabels("expected agreement is 1; kappa undefined")
    return (observed - expected) / (1.0 - expected)


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = mean_rank
        i = j + 1
    return ranks


def _pearson(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    var_x = sum(v * v for v in dx)
    var_y = sum(v * v for v in dy)
    if var_x == 0 or var_y == 0:
        raise ConstantInput("correlation undefined for constant input")
    cov = sum(u * v for u, v in zip(dx, dy))
    return cov / math.sqrt(var_x * var_y)


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-ranked values (ties get average rank)."""
    if len(x) != len(y):
        raise ValueError("sequences must have equal length")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    return _pearson(average_ranks(x), average_ranks(y))


def aggregate(values: Sequence[float]) -> MetricSummary:
    """Mean and sample (n-1) standard deviation; std is 0 for a single value."""
    if not values:
        raise ValueError("values must be non-empty")
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return MetricSummary(mean=mean, std=0.0, n=1)
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return MetricSummary(mean=mean, std=math.sqrt(var), n=n)


@dataclass
class EvalReport:
    """Rendered metric table plus the machine-readable per-cell records."""

    table: str
    records: list[dict]

    def records_jsonl(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.records)


def _decimals_for(metric: str) -> int:
    return 1 if metric.lower().startswith("rouge") else 2


def report(rows: Mapping[str, Mapping[str, Sequence[float]]]) -> EvalReport:
    """Aggregate per-question metric values into a systems-by-metrics table.

    Cells render as ``mean_(std)`` with 1-decimal values on ROUGE rows and
    2 decimals elsewhere. Every system must share the same metric set.
    """
    if not rows:
        raise ValueError("no systems to report")
    systems = list(rows)
    metrics = list(rows[systems[0]])
    metric_set = set(metrics)
    for system in systems:
        if set(rows[system]) != metric_set:
            raise ValueError(f"system {system!r} has a mismatched metric set")

    records = []
    cells: dict[tuple[str, str], str] = {}
    for system in systems:
        for metric in metrics:
            summary = aggregate(list(rows[system][metric]))
            records.append({
                "system": system, "metric": metric,
                "mean": summary.mean, "std": summary.std, "n": summary.n,
            })
            nd = _decimals_for(metric)
            cells[(system, metric)] = f"{summary.mean:.{nd}f}_({summary.std:.{nd}f})"

    metric_width = max(len("Metric"), max(len(m) for m in metrics))
    widths = {s: max(len(s), max(len(cells[(s, m)]) for m in metrics)) for s in systems}
    header = " | ".join(["Metric".ljust(metric_width)] + [s.ljust(widths[s]) for s in systems])
    rule = "-+-".join(["-" * metric_width] + ["-" * widths[s] for s in systems])
    lines = [header, rule]
    for metric in metrics:
        lines.append(" | ".join(
            [metric.ljust(metric_width)] + [cells[(s, metric)].ljust(widths[s]) for s in systems]
        ))
    return EvalReport(table="\n".join(lines), records=records)


class ExternalScorer(Protocol):
    """A learned answer scorer served elsewhere (e.g. model-based metrics)."""

    name: str

    def score(self, candidate: str, reference: str, question: str | None = None) -> float: ...


class HttpScorer:
    """HTTP adapter for an external scorer: POST -> {"score": <real>}."""

    def __init__(self, name: str, endpoint: str, timeout_s: float = 30.0):
        self.name = name
        self.endpoint = endpoint
        self.timeout_s = timeout_s

    def score(self, candidate: str, reference: str, question: str | None = None) -> float:
        payload = {"candidate": candidate, "reference": reference}
        if question is not None:
            payload["question"] = question
        try:
            resp = requests.post(self.endpoint, json=payload, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise NetworkError(f"scorer {self.name!r} unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise MalformedResponse(f"scorer {self.name!r} returned HTTP {resp.status_code}")
        try:
            value = resp.json().get("score")
        except ValueError as exc:
            raise MalformedResponse(f"scorer {self.name!r} returned non-JSON") from exc
        if not isinstance(value, (int, float)) or not math.isfinite(float(value)):
            raise MalformedResponse(f"scorer {self.name!r} returned no numeric score")
        return float(value)

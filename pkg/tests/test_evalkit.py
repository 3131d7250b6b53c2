"""Metric and agreement statistics, verified against independent oracles."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from pragqa.errors import ConstantInput, DegenerateLabels, EmptyReference, MalformedResponse
from pragqa.evalkit import (
    HttpScorer,
    MetricSummary,
    aggregate,
    average_ranks,
    cohens_kappa,
    lcs_len,
    report,
    rouge_l,
    spearman,
)


def brute_force_lcs(a, b):
    """Exponential oracle: longest subsequence of ``a`` that is a subsequence of ``b``."""
    best = 0
    for size in range(len(a), best, -1):
        for combo in itertools.combinations(a, size):
            it = iter(b)
            if all(tok in it for tok in combo):
                best = size
                break
        if best:
            break
    return best


# ----------------------------------------------------------------------- lcs

def test_lcs_basics():
    assert lcs_len(["a", "b", "c"], ["a", "b", "c"]) == 3
    assert lcs_len(["a"], ["b"]) == 0
    assert lcs_len(["the", "cat", "sat"], ["the", "cat", "sat", "on", "the", "mat"]) == 3
    assert lcs_len([], ["a"]) == 0


@settings(max_examples=120, deadline=None)
@given(st.lists(st.sampled_from("abcd"), max_size=8),
       st.lists(st.sampled_from("abcd"), max_size=8))
def test_lcs_properties_vs_brute_force(a, b):
    value = lcs_len(a, b)
    assert value == brute_force_lcs(a, b)
    assert value == lcs_len(b, a)
    assert value <= min(len(a), len(b))
    assert lcs_len(a, a) == len(a)


# --------------------------------------------------------------------- rouge

def test_rouge_identical_and_disjoint():
    score = rouge_l("same words here", "same words here")
    assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)
    score = rouge_l("alpha beta", "gamma delta")
    assert (score.precision, score.recall, score.f1) == (0.0, 0.0, 0.0)


def test_rouge_worked_example():
    score = rouge_l("the cat sat", "the cat sat on the mat")
    assert score.precision == pytest.approx(1.0, abs=1e-9)
    assert score.recall == pytest.approx(0.5, abs=1e-9)
    assert score.f1 == pytest.approx(2 / 3, abs=1e-9)


def test_rouge_empty_candidate_and_reference():
    assert rouge_l("", "reference text").f1 == 0.0
    with pytest.raises(EmptyReference):
        rouge_l("candidate", "   ")


def test_rouge_lowercases():
    assert rouge_l("The CAT", "the cat").f1 == 1.0


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="ab c", min_size=1, max_size=20).filter(lambda s: s.split()))
def test_rouge_self_f1_is_one(text):
    assert rouge_l(text, text).f1 == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------------- kappa

def test_kappa_hand_contingency_table():
    # p_o = 3/4, p_e = 0.5 -> kappa exactly 0.5
    assert cohens_kappa([1, 1, 0, 0], [1, 0, 0, 0]) == 0.5


def test_kappa_perfect_agreement():
    assert cohens_kappa(["x", "y", "x"], ["x", "y", "x"]) == 1.0


def test_kappa_degenerate():
    with pytest.raises(DegenerateLabels):
        cohens_kappa(["a", "a"], ["a", "a"])


def test_kappa_random_labels_near_zero():
    rng = random.Random(20240131)
    a = [rng.randrange(3) for _ in range(10_000)]
    b = [rng.randrange(3) for _ in range(10_000)]
    assert abs(cohens_kappa(a, b)) <= 0.05


def test_kappa_length_mismatch():
    with pytest.raises(ValueError):
        cohens_kappa([1], [1, 2])


# ------------------------------------------------------------------ spearman

def test_spearman_monotone_and_reverse():
    x = [1.0, 2.0, 5.0, 9.0]
    assert spearman(x, x) == pytest.approx(1.0, abs=1e-12)
    assert spearman(x, list(reversed(x))) == pytest.approx(-1.0, abs=1e-12)


def test_spearman_tie_case_matches_hand_ranked_pearson():
    x = [1.0, 2.0, 2.0, 4.0]
    y = [1.0, 3.0, 2.0, 4.0]
    # hand ranks: x -> [1, 2.5, 2.5, 4], y -> [1, 3, 2, 4]; brute-force pearson
    rx, ry = [1.0, 2.5, 2.5, 4.0], [1.0, 3.0, 2.0, 4.0]
    mean_rx, mean_ry = sum(rx) / 4, sum(ry) / 4
    cov = sum((a - mean_rx) * (b - mean_ry) for a, b in zip(rx, ry))
    var_x = sum((a - mean_rx) ** 2 for a in rx)
    var_y = sum((b - mean_ry) ** 2 for b in ry)
    expected = cov / (var_x * var_y) ** 0.5
    assert average_ranks(x) == rx
    assert spearman(x, y) == pytest.approx(expected, abs=1e-9)


def test_spearman_agrees_with_scipy():
    rng = random.Random(11)
    x = [rng.uniform(-5, 5) for _ in range(50)]
    y = [rng.choice(x) for _ in range(50)]  # plenty of ties
    expected = scipy_stats.spearmanr(x, y).statistic
    assert spearman(x, y) == pytest.approx(expected, abs=1e-12)


def test_spearman_invariant_under_monotone_transform():
    rng = random.Random(3)
    x = [rng.uniform(0, 10) for _ in range(30)]
    y = [rng.uniform(0, 10) for _ in range(30)]
    base = spearman(x, y)
    assert spearman([v ** 3 + 2 for v in x], y) == pytest.approx(base, abs=1e-12)
    assert spearman(x, [2.5 * v + 1 for v in y]) == pytest.approx(base, abs=1e-12)


def test_spearman_constant_input():
    with pytest.raises(ConstantInput):
        spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        spearman([1.0], [1.0])


# ----------------------------------------------------------------- aggregate

def test_aggregate_cases():
    assert aggregate([5.0]) == MetricSummary(mean=5.0, std=0.0, n=1)
    summary = aggregate([1.0, 2.0, 3.0])
    assert summary.mean == pytest.approx(2.0)
    assert summary.std == pytest.approx(1.0)  # sample std with n-1
    assert aggregate([4.2, 4.2, 4.2]).std == 0.0


# -------------------------------------------------------------------- report

def test_report_single_value_cell_format():
    result = report({"gpt": {"ROUGE-L (F1)": [18.7]}})
    assert "18.7_(0.0)" in result.table
    assert result.records == [
        {"system": "gpt", "metric": "ROUGE-L (F1)", "mean": 18.7, "std": 0.0, "n": 1}]


def test_report_decimals_per_metric_family():
    result = report({"sys": {"ROUGE-L (F1)": [18.666], "other-metric": [1.2345, 1.2345]}})
    assert "18.7_(0.0)" in result.table
    assert "1.23_(0.00)" in result.table


def test_report_mismatched_metric_sets_error():
    with pytest.raises(ValueError):
        report({"a": {"m1": [1.0]}, "b": {"m2": [1.0]}})


def test_report_golden_fixture():
    rows = {
        "system-a": {
            "ROUGE-L (F1)": [18.7, 17.1, 20.3],
            "ROUGE-L (Recall)": [17.4, 15.0, 18.2],
            "helpfulness": [4.43, 4.6, 4.2],
        },
        "system-b": {
            "ROUGE-L (F1)": [18.6, 16.9, 19.8],
            "ROUGE-L (Recall)": [16.6, 14.8, 17.7],
            "helpfulness": [4.45, 4.5, 4.4],
        },
    }
    result = report(rows)
    from pathlib import Path
    golden = Path(__file__).parent / "golden" / "report_table.txt"
    assert result.table == golden.read_text(encoding="utf-8")
    assert len(result.records) == 6
    for record in result.records:
        assert set(record) == {"system", "metric", "mean", "std", "n"}


# ----------------------------------------------------------- external scorer

def test_http_scorer_roundtrip(scripted_server):
    scripted_server.reset([(200, {"score": 1.15})])
    scorer = HttpScorer(name="faithfulness", endpoint=scripted_server.url)
    assert scorer.score("candidate", "reference", "question?") == 1.15
    sent = scripted_server.requests[0]
    assert sent == {"candidate": "candidate", "reference": "reference",
                    "question": "question?"}


def test_http_scorer_bad_payload(scripted_server):
    scripted_server.reset([(200, {"not_score": 3})])
    scorer = HttpScorer(name="x", endpoint=scripted_server.url)
    with pytest.raises(MalformedResponse):
        scorer.score("c", "r")

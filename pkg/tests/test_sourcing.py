"""Question-sourcing heuristics: marker matching, post filtering, classification, rewriting."""

from __future__ import annotations

from pathlib import Path

import pytest

from pragqa.sourcing import (
    ASSUMPTION_CORRECTING_MARKERS,
    DEFAULT_LEXICON,
    EXPERTISE_INVOKING_MARKERS,
    WH_WORDS,
    MarkerLexicon,
    RedditComment,
    RedditPost,
    build_medical_filter_prompt,
    build_rewrite_prompt,
    classify_medical,
    filter_reddit,
    match_markers,
    rewrite_title,
)
from pragqa.stubs import StubCompletion

GOLDEN = Path(__file__).parent / "golden"


# ------------------------------------------------------------------- lexicon

def test_marker_lexicon_golden():
    assert ASSUMPTION_CORRECTING_MARKERS == (
        "however,", "actually,", "as a matter of fact", "in fact", "not true",
        "despite what you", "on the contrary", "common misconception", "not exactly",
        "just to clarify", "you're confusing", "correct me if i'm wrong",
        "correct me if i am wrong", "you're wrong", "we have to remember that",
        "while that's true", "could be dangerous", "might not be the best thing",
    )
    assert EXPERTISE_INVOKING_MARKERS == (
        "as a doctor", "as a medical professional", "i'm a doctor", "being a doctor",
        "as a nurse", "i'm a nurse", "i'm a medical professional", "being a nurse",
    )
    assert WH_WORDS == ("what", "when", "where", "which", "who", "whom", "whose", "why", "how")


def test_match_markers_examples():
    assert match_markers("Actually, that's a common misconception.",
                         ASSUMPTION_CORRECTING_MARKERS) == ["actually,", "common misconception"]
    assert match_markers("congrats!", ASSUMPTION_CORRECTING_MARKERS) == []
    assert match_markers("I'm a NURSE here", EXPERTISE_INVOKING_MARKERS) == ["i'm a nurse"]


def test_match_markers_returns_lexicon_order():
    text = "in fact however, this is not true"
    assert match_markers(text, ASSUMPTION_CORRECTING_MARKERS) == [
        "however,", "in fact", "not true"]


# ------------------------------------------------------------------ filtering

def _post(pid, title, comments):
    return RedditPost(id=pid, subreddit="r/NewParents", title=title,
                      comments=[RedditComment(text=t, score=s) for t, s in comments])


FIXTURE_POSTS = [
    _post("p1", "What formula brands are safe for newborns?",
          [("Actually, that's a common misconception.", 5)]),
    _post("p2", "Is it safe to co-sleep?", [("in fact it can be risky", 7)]),
    _post("p3", "How do I sterilize bottles?", [("great job!", 9)]),
    _post("p4", "Why does my baby cry at night?", [("I'm a nurse and this is normal", 0)]),
    _post("p5", "When should I start tummy time?", [("not true at all", 1)]),
    _post("p6", "Which diapers prevent rashes?",
          [("correct me if i'm wrong but cloth helps", 2)]),
    _post("p7", "What strollers are worth it?", [("As a doctor, I recommend a light one", -3)]),
    _post("p8", "Where can I find lactation help?", [("however, this depends", 3)]),
    _post("p9", "Formula feeding at night?", [("being a nurse, I can say it works", 4)]),
    _post("p10", "Who makes hypoallergenic formula?",
          [("nice", 10), ("might not be the best thing", 2)]),
]

# hand enumeration of the rule over the fixture:
#   p1 corrective(5>=2) + wh yes        -> keep
#   p2 corrective ok, title not wh      -> drop
#   p3 no marker                        -> drop
#   p4 expertise (no score floor) + wh  -> keep
#   p5 corrective score 1 < 2           -> drop
#   p6 corrective score 2 >= 2 + wh     -> keep
#   p7 expertise + wh                   -> keep
#   p8 corrective(3) + wh               -> keep
#   p9 expertise, title not wh          -> drop
#   p10 second comment corrective(2)+wh -> keep
EXPECTED_KEPT = ["p1", "p4", "p6", "p7", "p8", "p10"]


def test_filter_reddit_matches_hand_enumeration():
    kept = filter_reddit(FIXTURE_POSTS)
    assert [p.id for p in kept] == EXPECTED_KEPT


def test_filter_reddit_idempotent():
    once = filter_reddit(FIXTURE_POSTS)
    twice = filter_reddit(once)
    assert [p.id for p in twice] == [p.id for p in once]


def test_filter_reddit_wh_and_threshold_cases():
    keep = _post("x1", "What formula is best?", [("in fact", 5)])
    wrong_title = _post("x2", "Is it safe to do this?", [("in fact", 5)])
    assert [p.id for p in filter_reddit([keep, wrong_title])] == ["x1"]

    low_score = _post("x3", "What about this?", [("in fact", 1)])
    assert filter_reddit([low_score]) == []
    assert [p.id for p in filter_reddit([low_score], min_comment_score=1)] == ["x3"]


def test_filter_reddit_title_punctuation_stripped():
    post = _post("x4", "\"What\" now?", [("in fact", 5)])
    assert [p.id for p in filter_reddit([post])] == ["x4"]


def test_custom_lexicon():
    lexicon = MarkerLexicon(assumption_correcting=("nope",),
                            expertise_invoking=(), wh_words=("zzz",))
    post = _post("y1", "zzz is this thing on?", [("nope", 8)])
    assert [p.id for p in filter_reddit([post], lexicon=lexicon)] == ["y1"]
    assert filter_reddit([post]) == []  # default lexicon does not match


# -------------------------------------------------------------- classification

def test_classify_medical_parsing():
    assert classify_medical("Q?", StubCompletion(canned={"Question:": "non-medical"})) == "non_medical"
    assert classify_medical("Q?", StubCompletion(canned={"Question:": "medical"})) == "medical"
    # precedence: a reply containing "non-medical" wins even though it contains "medical"
    assert classify_medical("Q?", StubCompletion(canned={"Question:": "This is non-medical."})) == "non_medical"
    assert classify_medical("Q?", StubCompletion(canned={"Question:": "no idea"})) == "non_medical"


def test_classify_medical_prompt_golden():
    stub = StubCompletion(canned={"Question:": "medical"})
    classify_medical("Is my baby's fever dangerous?", stub)
    assert stub.calls[0] == (GOLDEN / "prompt_medical_filter.txt").read_text(encoding="utf-8")
    assert 'answer with "medical"' in stub.calls[0]
    assert 'If a question is under-specified, answer with "non-medical".' in stub.calls[0]


# ------------------------------------------------------------------ rewriting

def test_rewrite_title_uses_reply():
    stub = StubCompletion(canned={"Rewrite:": "What formula helps my 2-week-old?"})
    assert rewrite_title("What formula?", "My 2-week-old needs formula.", stub) == \
        "What formula helps my 2-week-old?"


def test_rewrite_title_blank_reply_keeps_original():
    stub = StubCompletion(canned={"Rewrite:": ""})
    assert rewrite_title("What formula?", "desc", stub) == "What formula?"


def test_rewrite_prompt_golden_and_exemplar():
    built = build_rewrite_prompt("Spit up after feeding?",
                                 "My 2-week-old spits up after every feeding.")
    assert built == (GOLDEN / "prompt_title_rewrite.txt").read_text(encoding="utf-8")
    assert "How to wean my 11-month-old out of Co-Sleeping?" in built


def test_medical_filter_prompt_contains_question():
    built = build_medical_filter_prompt("Is it safe?")
    assert built.endswith("Question: Is it safe?")

"""Heuristics that mine candidate questions from community posts.

The filters are recall-oriented: keep a post when some comment pushes back on
an assumption (or a commenter invokes medical expertise) and the title starts
with a wh word, then classify and rewrite with a completion backend.
"""

from __future__ import annotations

import json
import string
from dataclasses import asdict, dataclass, field

from . import prompts
from .backends import CompletionRequest
from .errors import CorruptRecord, IoError
from .pipeline import CompletionBackend

ASSUMPTION_CORRECTING_MARKERS = (
    "however,",
    "actually,",
    "as a matter of fact",
    "in fact",
    "not true",
    "despite what you",
    "on the contrary",
    "common misconception",
    "not exactly",
    "just to clarify",
    "you're confusing",
    "correct me if i'm wrong",
    "correct me if i am wrong",
    "you're wrong",
    "we have to remember that",
    "while that's true",
    "could be dangerous",
    "might not be the best thing",
)

EXPERTISE_INVOKING_MARKERS = (
    "as a doctor",
    "as a medical professional",
    "i'm a doctor",
    "being a doctor",
    "as a nurse",
    "i'm a nurse",
    "i'm a medical professional",
    "being a nurse",
)

# "how" is included: kept community questions demonstrably start with it.
WH_WORDS = ("what", "when", "where", "which", "who", "whom", "whose", "why", "how")


@dataclass(frozen=True)
class MarkerLexicon:
    assumption_correcting: tuple[str, ...] = ASSUMPTION_CORRECTING_MARKERS
    expertise_invoking: tuple[str, ...] = EXPERTISE_INVOKING_MARKERS
    wh_words: tuple[str, ...] = WH_WORDS


DEFAULT_LEXICON = MarkerLexicon()


@dataclass
class RedditComment:
    text: str
    score: int


@dataclass
class RedditPost:
    id: str
    subreddit: str
    title: str
    description: str = ""
    comments: list[RedditComment] = field(default_factory=list)

    def __post_init__(self):
        if not self.title:
            raise ValueError("post title must be non-empty")


def match_markers(text: str, markers: tuple[str, ...] | list[str]) -> list[str]:
    """Markers whose lowercase form occurs as a substring of the lowercased text."""
    lowered = text.lower()
    return [m for m in markers if m.lower() in lowered]


def _title_is_wh(title: str, wh_words: tuple[str, ...] | list[str]) -> bool:
    tokens = title.split()
    if not tokens:
        return False
    first = tokens[0].lower().strip(string.punctuation)
    return first in wh_words


def filter_reddit(posts: list[RedditPost], lexicon: MarkerLexicon = DEFAULT_LEXICON,
                  min_comment_score: int = 2) -> list[RedditPost]:
    """Keep posts with corrective or expert comments whose title starts with a wh word.

    Assumption-correcting comments must carry at least ``min_comment_score``;
    expertise-invoking comments count regardless of score.
    """
    kept = []
    for post in posts:
        corrected = any(
            c.score >= min_comment_score and match_markers(c.text, lexicon.assumption_correcting)
            for c in post.comments
        )
        expertise = any(match_markers(c.text, lexicon.expertise_invoking) for c in post.comments)
        if (corrected or expertise) and _title_is_wh(post.title, lexicon.wh_words):
            kept.append(post)
    return kept


def post_provenance(post: RedditPost, lexicon: MarkerLexicon = DEFAULT_LEXICON) -> dict:
    """Which markers matched where; attached to filter output for auditing."""
    matched = []
    for comment in post.comments:
        hits = match_markers(comment.text, lexicon.assumption_correcting)
        hits += match_markers(comment.text, lexicon.expertise_invoking)
        matched.extend(h for h in hits if h not in matched)
    return {"matched_markers": matched}


def build_medical_filter_prompt(question: str) -> str:
    return f"{prompts.MEDICAL_FILTER_PROMPT}\n\nQuestion: {question}"


def classify_medical(question: str, backend: CompletionBackend) -> str:
    """Classify a question as "medical" or "non_medical".

    "non-medical" takes substring precedence in the reply (it contains
    "medical"); anything unrecognized defaults to non_medical.
    """
    if not question:
        raise ValueError("question must be non-empty")
    reply = backend.complete(CompletionRequest(prompt=build_medical_filter_prompt(question)))
    lowered = reply.lower()
    if "non-medical" in lowered:
        return "non_medical"
    if "medical" in lowered:
        return "medical"
    return "non_medical"


@dataclass(frozen=True)
class RewriteExemplar:
    title: str
    description: str
    rewrite: str


DEFAULT_REWRITE_EXEMPLARS = (
    RewriteExemplar(
        title="How to Stop Co-Sleeping",
        description="My 11-month-old has been sleeping in our bed since birth and "
                    "I would like her to start sleeping in her own crib.",
        rewrite="How to wean my 11-month-old out of Co-Sleeping?",
    ),
)


def build_rewrite_prompt(title: str, description: str,
                         exemplars: tuple[RewriteExemplar, ...] = DEFAULT_REWRITE_EXEMPLARS) -> str:
    blocks = [prompts.TITLE_REWRITE_PROMPT]
    for ex in exemplars:
        blocks.append(f"Title: {ex.title}\nDescription: {ex.description}\nRewrite: {ex.rewrite}")
    blocks.append(f"Title: {title}\nDescription: {description}\nRewrite:")
    return "\n\n".join(blocks)


def rewrite_title(title: str, description: str, backend: CompletionBackend,
                  exemplars: tuple[RewriteExemplar, ...] = DEFAULT_REWRITE_EXEMPLARS) -> str:
    """Fold relevant description details into the title question.

    A blank completion means no usable rewrite; the original title is kept.
    """
    if not title:
        raise ValueError("title must be non-empty")
    prompt = build_rewrite_prompt(title, description, exemplars)
    reply = backend.complete(CompletionRequest(prompt=prompt)).strip()
    return reply if reply else title


def load_posts(path: str) -> list[RedditPost]:
    posts = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            raise CorruptRecord("invalid JSON", number) from None
        if not isinstance(record, dict):
            raise CorruptRecord("record is not an object", number)
        try:
            comments = [RedditComment(text=c["text"], score=int(c["score"]))
                        for c in record.get("comments", [])]
            posts.append(RedditPost(
                id=record["id"], subreddit=record.get("subreddit", ""),
                title=record["title"], description=record.get("description", ""),
                comments=comments,
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptRecord(f"bad post record: {exc}", number) from None
    return posts


def dump_post(post: RedditPost, extra: dict | None = None) -> str:
    record = asdict(post)
    if extra:
        record.update(extra)
    return json.dumps(record, sort_keys=True, ensure_ascii=False)

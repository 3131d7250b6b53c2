"""The native question/inference dataset format, summary statistics, and cross-tabulation."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import IoError, SchemaError
from .inference import Evidence, ITYPE_VALUES, PragmaticInference, VERACITY_VALUES

SOURCES = ("rosie", "reddit", "nq")


@dataclass
class DatasetRecord:
    question_id: str
    source: str
    question_text: str
    expert_answer: str | None = None
    inferences: list[PragmaticInference] = field(default_factory=list)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"invalid source {self.source!r}")
        for inf in self.inferences:
            if inf.question_id != self.question_id:
                raise ValueError(
                    f"inference {inf.id} belongs to {inf.question_id}, not {self.question_id}"
                )


@dataclass
class SourceStats:
    n_questions: int
    mean_answer_sentences: float
    n_inferences: int
    pct_false_subjective: float
    pct_true: float
    n_unknown_veracity: int = 0


def _inference_to_dict(inf: PragmaticInference) -> dict:
    record: dict = {
        "id": inf.id,
        "question_id": inf.question_id,
        "text": inf.text,
        "veracity": inf.veracity,
        "itype": inf.itype,
        "plausibility": list(inf.plausibility),
        "addressed": inf.addressed,
    }
    record["evidence"] = (
        {"url": inf.evidence.url, "passage_text": inf.evidence.passage_text}
        if inf.evidence else None
    )
    return record


def _record_to_dict(record: DatasetRecord) -> dict:
    return {
        "question_id": record.question_id,
        "source": record.source,
        "question_text": record.question_text,
        "expert_answer": record.expert_answer,
        "inferences": [_inference_to_dict(i) for i in record.inferences],
    }


def _field_error(qid: str, name: str, detail: str) -> SchemaError:
    return SchemaError(f"record {qid!r}: field {name!r} {detail}")


def _parse_inference(raw: dict, qid: str) -> PragmaticInference:
    if not isinstance(raw, dict):
        raise _field_error(qid, "inferences", "contains a non-object entry")
    text = raw.get("text")
    if not isinstance(text, str) or not text:
        raise _field_error(qid, "text", "must be a non-empty string")
    veracity = raw.get("veracity", "unknown")
    if veracity not in VERACITY_VALUES:
        raise _field_error(qid, "veracity", f"invalid value {veracity!r}")
    itype = raw.get("itype", "unlabeled")
    if itype not in ITYPE_VALUES:
        raise _field_error(qid, "itype", f"invalid value {itype!r}")
    plausibility = raw.get("plausibility", [])
    if not isinstance(plausibility, list):
        raise _field_error(qid, "plausibility", "must be a list")
    for rating in plausibility:
        if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
            raise _field_error(qid, "plausibility", f"rating {rating!r} outside 1..5")
    addressed = raw.get("addressed")
    if addressed is not None and not isinstance(addressed, bool):
        raise _field_error(qid, "addressed", "must be a boolean or null")
    evidence_raw = raw.get("evidence")
    evidence = None
    if evidence_raw is not None:
        if not (isinstance(evidence_raw, dict)
                and isinstance(evidence_raw.get("url"), str)
                and isinstance(evidence_raw.get("passage_text"), str)):
            raise _field_error(qid, "evidence", "needs 'url' and 'passage_text'")
        evidence = Evidence(url=evidence_raw["url"], passage_text=evidence_raw["passage_text"])
    return PragmaticInference(
        id=str(raw.get("id", "")), question_id=qid, text=text, veracity=veracity,
        itype=itype, plausibility=list(plausibility), addressed=addressed, evidence=evidence,
    )


def _parse_record(raw: dict) -> DatasetRecord:
    qid = raw.get("question_id")
    if not isinstance(qid, str) or not qid:
        raise SchemaError("record with missing or empty 'question_id'")
    source = raw.get("source")
    if source not in SOURCES:
        raise _field_error(qid, "source", f"invalid value {source!r}")
    question_text = raw.get("question_text")
    if not isinstance(question_text, str) or not question_text:
        raise _field_error(qid, "question_text", "must be a non-empty string")
    expert_answer = raw.get("expert_answer")
    if expert_answer is not None and not isinstance(expert_answer, str):
        raise _field_error(qid, "expert_answer", "must be a string or null")
    inferences_raw = raw.get("inferences", [])
    if not isinstance(inferences_raw, list):
        raise _field_error(qid, "inferences", "must be a list")
    inferences = [_parse_inference(entry, qid) for entry in inferences_raw]
    return DatasetRecord(
        question_id=qid, source=source, question_text=question_text,
        expert_answer=expert_answer, inferences=inferences,
    )


def load_dataset(path: str) -> list[DatasetRecord]:
    """Load and schema-validate the native line-delimited dataset format."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    records = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError:
            raise SchemaError(f"line {number}: invalid JSON") from None
        if not isinstance(raw, dict):
            raise SchemaError(f"line {number}: record is not an object")
        records.append(_parse_record(raw))
    return records


def save_dataset(records: list[DatasetRecord], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(_record_to_dict(record), sort_keys=True,
                                    ensure_ascii=False) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# Veracity spellings seen in externally produced files.
EXTERNAL_VERACITY_MAP = {
    "true": "true",
    "false": "false",
    "subjective": "subjective",
    "unsure": "subjective",
    "false/unsure": "false",
    "unknown": "unknown",
}


def from_external_record(raw: dict,
                         veracity_map: dict[str, str] = EXTERNAL_VERACITY_MAP) -> DatasetRecord:
    """Adapter for externally produced records with slightly different field names.

    Accepts ``question``/``question_text``, inference ``assumption``/``text``,
    and maps veracity spellings through ``veracity_map``. Everything is then
    validated by the native parser.
    """
    question_id = str(raw.get("question_id") or raw.get("id") or "")
    converted: dict = {
        "question_id": question_id,
        "source": raw.get("source"),
        "question_text": raw.get("question_text") or raw.get("question"),
        "expert_answer": raw.get("expert_answer") or raw.get("answer"),
        "inferences": [],
    }
    for i, inf in enumerate(raw.get("inferences", [])):
        veracity = str(inf.get("veracity", "unknown")).strip().lower()
        converted["inferences"].append({
            "id": str(inf.get("id") or f"{question_id}-i{i}"),
            "text": inf.get("text") or inf.get("assumption") or inf.get("inference"),
            "veracity": veracity_map.get(veracity, veracity),
            "itype": str(inf.get("itype", inf.get("type", "unlabeled"))).strip().lower(),
            "plausibility": inf.get("plausibility", []),
            "addressed": inf.get("addressed"),
            "evidence": inf.get("evidence"),
        })
    return _parse_record(converted)


_TERMINATOR_RE = re.compile(r"[.!?]+(?=\s|$)")


def count_sentences(text: str) -> int:
    """Maximal segments ending in '.', '!', or '?' followed by whitespace/end.

    Trailing text without a terminator counts as one more sentence if
    non-blank. Abbreviations are not special-cased ("e.g. test" counts 2).
    """
    count = 0
    tail_start = 0
    for match in _TERMINATOR_RE.finditer(text):
        count += 1
        tail_start = match.end()
    if text[tail_start:].strip():
        count += 1
    return count


def stats(records: list[DatasetRecord]) -> dict[str, SourceStats]:
    """Per-source question counts, answer lengths, and veracity percentages.

    Inferences with unknown veracity are excluded from the percentage split
    and surfaced in ``n_unknown_veracity``.
    """
    if not records:
        raise ValueError("records must be non-empty")
    out: dict[str, SourceStats] = {}
    for source in SOURCES:
        group = [r for r in records if r.source == source]
        if not group:
            continue
        answers = [r.expert_answer for r in group if r.expert_answer]
        mean_sentences = (
            sum(count_sentences(a) for a in answers) / len(answers) if answers else 0.0
        )
        inferences = [i for r in group for i in r.inferences]
        labeled = [i for i in inferences if i.veracity != "unknown"]
        n_false_subj = sum(1 for i in labeled if i.veracity in ("false", "subjective"))
        n_true = sum(1 for i in labeled if i.veracity == "true")
        out[source] = SourceStats(
            n_questions=len(group),
            mean_answer_sentences=mean_sentences,
            n_inferences=len(inferences),
            pct_false_subjective=100.0 * n_false_subj / len(labeled) if labeled else 0.0,
            pct_true=100.0 * n_true / len(labeled) if labeled else 0.0,
            n_unknown_veracity=len(inferences) - len(labeled),
        )
    return out


@dataclass
class CrossTab:
    """Counts over veracity x inference type x addressed, for fully labeled inferences."""

    counts: dict[tuple[str, str, bool], int]
    shares: dict[tuple[str, str, bool], float]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def crosstab(records: list[DatasetRecord]) -> CrossTab:
    """3-way contingency counts plus shares normalized within (veracity, itype) rows.

    Only inferences with a known type and an addressed judgment participate;
    an empty selection yields an empty table.
    """
    counts: dict[tuple[str, str, bool], int] = {}
    for record in records:
        for inf in record.inferences:
            if inf.itype == "unlabeled" or inf.addressed is None:
                continue
            key = (inf.veracity, inf.itype, inf.addressed)
            counts[key] = counts.get(key, 0) + 1
    row_totals: dict[tuple[str, str], int] = {}
    for (veracity, itype, _), n in counts.items():
        row_totals[(veracity, itype)] = row_totals.get((veracity, itype), 0) + n
    shares = {
        key: n / row_totals[(key[0], key[1])]
        for key, n in counts.items()
    }
    return CrossTab(counts=counts, shares=shares)


# ------------------------------------------------------------------ synthesis

_SYNTH_SPEC = {
    # per source: questions, inferences, false-or-subjective count, and a
    # repeating per-question sentence-count pattern for the written answers
    "rosie": dict(n_questions=200, n_inferences=1161, n_false_subjective=261,
                  sentence_pattern=(4, 4, 4, 4, 4, 4, 4, 4, 4, 3)),
    "reddit": dict(n_questions=200, n_inferences=1114, n_false_subjective=343,
                   sentence_pattern=(7, 7, 7, 7, 7, 7, 6, 6, 6, 6)),
    "nq": dict(n_questions=100, n_inferences=452, n_false_subjective=91,
               sentence_pattern=(6, 6, 6, 6, 6, 6, 5, 5, 5, 5)),
}


def synthesize_dataset() -> list[DatasetRecord]:
    """Deterministic full-scale synthetic dataset for demos and tests.

    Shape: 200/200/100 questions over the three sources carrying
    1161/1114/452 inferences, with false-or-subjective shares of
    22.5/30.8/20.1 percent (to rounding) and answer lengths averaging
    3.9/6.6/5.6 sentences.
    """
    records = []
    for source, spec in _SYNTH_SPEC.items():
        n_questions = spec["n_questions"]
        n_inferences = spec["n_inferences"]
        base, extra = divmod(n_inferences, n_questions)
        pattern = spec["sentence_pattern"]
        counter = 0
        for q in range(n_questions):
            qid = f"{source}-q{q:03d}"
            n_sentences = pattern[q % len(pattern)]
            answer = " ".join(
                f"This is sentence {s + 1} of the expert answer for {qid}."
                for s in range(n_sentences)
            )
            inferences = []
            for j in range(base + (1 if q < extra else 0)):
                if counter < spec["n_false_subjective"]:
                    veracity = "false" if counter % 2 == 0 else "subjective"
                else:
                    veracity = "true"
                inferences.append(PragmaticInference(
                    id=f"{qid}-i{j}",
                    question_id=qid,
                    text=f"Synthetic inference {j} for question {qid}.",
                    veracity=veracity,
                    itype=("presupposition", "implicature")[counter % 2],
                    plausibility=[(counter % 5) + 1],
                    addressed=(counter % 3 != 2),
                ))
                counter += 1
            records.append(DatasetRecord(
                question_id=qid, source=source,
                question_text=f"Synthetic question {q} from source {source}?",
                expert_answer=answer, inferences=inferences,
            ))
    return records

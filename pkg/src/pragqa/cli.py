"""Command-line entry points for every workflow.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 backend error.
Machine-readable output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .config import ConfigError, build_backend, build_engine, build_scorer, load_config
from .corpus import chunk_document, load_documents, load_store, save_store
from .dataset import SOURCES, load_dataset, stats
from .errors import (
    CorpusExhausted,
    CorruptRecord,
    DimensionMismatch,
    EmptyDocument,
    IoError,
    MalformedResponse,
    NetworkError,
    ParseError,
    RateLimited,
    SchemaError,
    StageFailure,
)
from .evalkit import report, rouge_l
from .inference import (
    build_generation_prompt,
    default_exemplars,
    generate_inferences,
    load_exemplars,
)
from .pipeline import AnswerBundle
from .retrieval import build_index, nearest_neighbor_select, save_index
from .sourcing import (
    classify_medical,
    dump_post,
    filter_reddit,
    load_posts,
    post_provenance,
    rewrite_title,
)

_DATA_ERRORS = (IoError, CorruptRecord, SchemaError, EmptyDocument, ParseError,
                CorpusExhausted, ValueError)
_BACKEND_ERRORS = (NetworkError, RateLimited, MalformedResponse, DimensionMismatch,
                   StageFailure)


def _config_options(fn):
    fn = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                      help="Override a config value (dotted keys).")(fn)
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="Path to a JSON config file.")(fn)
    return fn


@click.group()
@click.version_option(__version__)
def cli():
    """Assumption-aware retrieval QA: corpus tools, pipelines, and evaluation."""


@cli.command()
@_config_options
@click.option("--docs", required=True, type=click.Path(), help="Line-delimited document records.")
@click.option("--out", required=True, type=click.Path(), help="Passage store to write.")
@click.option("--chunk-size", default=100, show_default=True)
def ingest(config_path, overrides, docs, out, chunk_size):
    """Chunk documents into fixed-size passages and write the store."""
    load_config(config_path, list(overrides))
    documents = load_documents(docs)
    passages = []
    for doc in documents:
        passages.extend(chunk_document(doc, chunk_size=chunk_size))
    save_store(passages, out)
    click.echo(json.dumps({"documents": len(documents), "passages": len(passages)}))


@cli.command(name="index")
@_config_options
@click.option("--passages", "passages_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path(), help="Index file to write.")
@click.option("--batch-size", default=64, show_default=True)
def index_cmd(config_path, overrides, passages_path, out, batch_size):
    """Embed a passage store and write the vector index."""
    config = load_config(config_path, list(overrides))
    embedder = build_backend("embed", config["backends"]["embed"])
    passages = load_store(passages_path)
    index = build_index(passages, embedder.embed, batch_size=batch_size)
    save_index(index, out)
    click.echo(json.dumps({"entries": index.size, "dim": index.dim}))


def _read_question(question: str) -> str:
    if question == "-":
        return sys.stdin.read().strip()
    return question


@cli.command()
@_config_options
@click.option("--question", "-q", required=True, help="Question text, or '-' for stdin.")
@click.option("--mode", type=click.Choice(["baseline", "augmented"]), default="baseline",
              show_default=True)
@click.option("--k", default=0, show_default=True,
              help="Baseline padding passages beyond the top five.")
@click.option("--inference", "inferences", multiple=True,
              help="Assumption text (repeatable; augmented mode).")
@click.option("--question-id", default=None, help="Id stamped into the bundle for eval joins.")
@click.option("--jobs", default=1, show_default=True, help="Worker threads for per-inference stages.")
@click.option("--seed", default=None, type=int, help="Exemplar shuffle seed for generation.")
@click.option("--dry-run", is_flag=True,
              help="Print the reader prompt without calling the reader backend.")
def ask(config_path, overrides, question, mode, k, inferences, question_id, jobs, seed, dry_run):
    """Run one pipeline and print the answer bundle as JSON."""
    config = load_config(config_path, list(overrides))
    engine = build_engine(config)
    question = _read_question(question)
    if mode == "baseline":
        bundle = engine.run_baseline(question, k=k, question_id=question_id, dry_run=dry_run)
    else:
        used_seed = None
        inference_list = list(inferences)
        if not inference_list:
            inference_list, used_seed = engine.generate_question_inferences(question, seed=seed)
        bundle = engine.run_augmented(question, inference_list, jobs=jobs,
                                      exemplar_seed=used_seed, question_id=question_id,
                                      dry_run=dry_run)
    if dry_run:
        click.echo(bundle.prompt_text)
    else:
        click.echo(bundle.to_json())


@cli.command()
@_config_options
@click.option("--question", "-q", required=True, help="Question text, or '-' for stdin.")
@click.option("--seed", default=None, type=int, help="Exemplar shuffle seed.")
@click.option("--dry-run", is_flag=True, help="Print the generation prompt; no backend call.")
def infer(config_path, overrides, question, seed, dry_run):
    """Generate the assumption list for a question."""
    config = load_config(config_path, list(overrides))
    question = _read_question(question)
    used_seed = config["inference"]["exemplar_seed"] if seed is None else seed
    exemplars_path = config["inference"].get("exemplars_path")
    exemplars = load_exemplars(exemplars_path) if exemplars_path else default_exemplars()
    shuffled = exemplars.shuffled(used_seed)
    if dry_run:
        click.echo(build_generation_prompt(question, shuffled))
        return
    backend = build_backend("generate", config["backends"]["generate"])
    inferences = generate_inferences(question, shuffled, backend)
    click.echo(json.dumps({"question": question, "seed": used_seed,
                           "inferences": inferences}, ensure_ascii=False))


@cli.command(name="reddit-filter")
@_config_options
@click.option("--posts", "posts_path", required=True, type=click.Path())
@click.option("--min-score", default=2, show_default=True,
              help="Minimum score for assumption-correcting comments.")
@click.option("--classify", is_flag=True,
              help="Also run medical/non-medical classification on kept titles.")
@click.option("--rewrite", is_flag=True,
              help="Also rewrite kept titles using post descriptions.")
def reddit_filter(config_path, overrides, posts_path, min_score, classify, rewrite):
    """Keep posts with corrective/expert comments and wh-word titles.

    Output records carry provenance: matched_markers always, classification
    and rewrite when the corresponding flags (and their backends) are on.
    """
    config = load_config(config_path, list(overrides))
    backend = None
    if classify or rewrite:
        backend = build_backend("read", config["backends"]["read"])
    posts = load_posts(posts_path)
    kept = filter_reddit(posts, min_comment_score=min_score)
    for post in kept:
        extra = post_provenance(post)
        if classify:
            extra["classification"] = classify_medical(post.title, backend)
        if rewrite:
            extra["rewrite"] = rewrite_title(post.title, post.description, backend)
        click.echo(dump_post(post, extra=extra))
    click.echo(json.dumps({"read": len(posts), "kept": len(kept)}), err=True)


@cli.command(name="nq-select")
@_config_options
@click.option("--seeds", "seeds_path", required=True, type=click.Path(),
              help="Seed questions, one per line.")
@click.option("--pool", "pool_path", required=True, type=click.Path(),
              help="Candidate questions, one per line.")
@click.option("--k-per-seed", default=100, show_default=True)
def nq_select(config_path, overrides, seeds_path, pool_path, k_per_seed):
    """Select topical pool questions: union of each seed's nearest neighbors."""
    config = load_config(config_path, list(overrides))
    embedder = build_backend("embed", config["backends"]["embed"])
    seeds = _read_lines(seeds_path)
    pool = _read_lines(pool_path)
    selected = nearest_neighbor_select(seeds, pool, embedder.embed, k_per_seed=k_per_seed)
    for i in sorted(selected):
        click.echo(json.dumps({"index": i, "text": pool[i]}, ensure_ascii=False))


def _read_lines(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


@cli.command(name="eval")
@_config_options
@click.option("--bundles", "bundles_path", required=True, type=click.Path(),
              help="Line-delimited answer bundles carrying question_id.")
@click.option("--references", "references_path", required=True, type=click.Path(),
              help="Line-delimited {question_id, reference} records.")
@click.option("--metrics", default="rougeL", show_default=True,
              help="Comma-separated: rougeL and/or ext:<scorer-name>.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def eval_cmd(config_path, overrides, bundles_path, references_path, metrics, fmt):
    """Score answer bundles against references and print the report."""
    config = load_config(config_path, list(overrides))
    bundles = _load_bundles(bundles_path)
    references = _load_references(references_path)

    bundle_ids = {b.question_id for b in bundles}
    for bundle in bundles:
        if bundle.question_id is None:
            raise SchemaError("bundle without a question_id cannot be matched")
        if bundle.question_id not in references:
            raise SchemaError(f"no reference for bundle id {bundle.question_id!r}")
    for ref_id in references:
        if ref_id not in bundle_ids:
            raise SchemaError(f"no bundle for reference id {ref_id!r}")

    metric_names = [m.strip() for m in metrics.split(",") if m.strip()]
    rows: dict[str, dict[str, list[float]]] = {}
    for bundle in bundles:
        system = bundle.backend_ids.get("read", "system")
        reference = references[bundle.question_id]
        row = rows.setdefault(system, {})
        for name in metric_names:
            if name == "rougeL":
                score = rouge_l(bundle.answer_text, reference)
                row.setdefault("ROUGE-L (F1)", []).append(100.0 * score.f1)
                row.setdefault("ROUGE-L (Recall)", []).append(100.0 * score.recall)
            elif name.startswith("ext:"):
                scorer = build_scorer(name[4:], config)
                value = scorer.score(bundle.answer_text, reference, bundle.question)
                row.setdefault(scorer.name, []).append(value)
            else:
                raise ConfigError(f"unknown metric {name!r}")
    result = report(rows)
    if fmt == "table":
        click.echo(result.table)
    else:
        click.echo(result.records_jsonl())


def _load_bundles(path: str) -> list[AnswerBundle]:
    bundles = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            bundles.append(AnswerBundle.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptRecord(f"bad bundle record: {exc}", number) from None
    return bundles


def _load_references(path: str) -> dict[str, str]:
    references: dict[str, str] = {}
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
            references[record["question_id"]] = record["reference"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptRecord(f"bad reference record: {exc}", number) from None
    return references


_STATS_LABELS = {"rosie": "Maternal Health QA", "reddit": "Reddit", "nq": "Natural Questions"}


@cli.command(name="stats")
@_config_options
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def stats_cmd(config_path, overrides, dataset_path, fmt):
    """Per-source dataset statistics: questions, answer length, inference veracity split."""
    load_config(config_path, list(overrides))
    records = load_dataset(dataset_path)
    by_source = stats(records)
    if fmt == "json":
        payload = {
            source: {
                "n_questions": s.n_questions,
                "mean_answer_sentences": s.mean_answer_sentences,
                "n_inferences": s.n_inferences,
                "pct_false_subjective": s.pct_false_subjective,
                "pct_true": s.pct_true,
                "n_unknown_veracity": s.n_unknown_veracity,
            }
            for source, s in by_source.items()
        }
        click.echo(json.dumps(payload, sort_keys=True))
        return
    sources = [s for s in SOURCES if s in by_source]
    headers = [_STATS_LABELS[s] for s in sources]
    rows = [
        ("# questions", [str(by_source[s].n_questions) for s in sources]),
        ("ans. length (# sent)", [f"{by_source[s].mean_answer_sentences:.1f}" for s in sources]),
        ("# inferences", [str(by_source[s].n_inferences) for s in sources]),
        ("% false/subjective", [f"{by_source[s].pct_false_subjective:.1f}" for s in sources]),
        ("% true", [f"{by_source[s].pct_true:.1f}" for s in sources]),
    ]
    label_width = max(len(r[0]) for r in rows)
    widths = [max(len(h), max(len(r[1][i]) for r in rows)) for i, h in enumerate(headers)]
    click.echo(" | ".join([" " * label_width] + [h.ljust(w) for h, w in zip(headers, widths)]))
    for label, cells in rows:
        click.echo(" | ".join([label.ljust(label_width)]
                              + [c.ljust(w) for c, w in zip(cells, widths)]))


@cli.command()
@_config_options
@click.option("--host", default=None, help="Bind host (defaults to config).")
@click.option("--port", default=None, type=int, help="Bind port (defaults to config).")
def serve(config_path, overrides, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path, list(overrides))
    engine = build_engine(config)
    app = create_app(engine, request_timeout_s=config["service"]["timeout_s"])
    uvicorn.run(app, host=host or config["service"]["host"],
                port=port or config["service"]["port"], log_level="info")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except _BACKEND_ERRORS as exc:
        click.echo(f"backend error: {exc}", err=True)
        return 3
    except _DATA_ERRORS as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())

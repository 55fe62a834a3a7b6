"""Command-line interface for the toolkit.

Exit codes for ``pipeline run``: 0 success, 2 configuration error,
3 stage failure, 4 awaiting human annotation.
"""

from __future__ import annotations

import logging
import sys
from datetime import date
from pathlib import Path

import click

from . import __version__
from .annotation.api import create_app
from .annotation.store import SessionStore
from .corpus.client import ChroniclingAmericaClient, ingest_corpus
from .corpus.config import load_corpus_config
from .corpus.store import CorpusStore, load_corpus
from .dedupe import dedupe_snippets
from .embedding.model import (
    Hyperparams,
    contrastive_neighbors,
    export_text,
    load_model,
    nearest_neighbors,
    save_model,
)
from .embedding.preprocess import RuleLemmatizer, default_stopwords, preprocess_snippet
from .embedding.train import train_embeddings
from .embedding.vocab import build_vocab
from .errors import ConfigurationError, DiscourseKitError, StageError
from .pipeline.config import load_pipeline_config
from .pipeline.fixture import build_fixture_corpus
from .pipeline.runner import AwaitingAnnotation, run_pipeline
from .snippets import build_snippet_set, read_snippets_jsonl, write_snippets_jsonl
from .stats import (
    CountTable,
    PriorModel,
    classify_over_representation,
    log_odds_informative_dirichlet,
)
from .variants.candidates import (
    build_candidates,
    read_candidates_jsonl,
    write_candidates_jsonl,
)
from .variants.rules import RuleLexicons, classify_candidate
from .variants.subword import (
    SubwordParams,
    load_subword_model,
    rank_similar_forms,
    save_subword_model,
    train_subword_model,
)

log = logging.getLogger(__name__)


def _parse_date(value: str) -> date:
    return date.fromisoformat(value)


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Corpus discourse comparison over partitioned OCR newspapers."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


# -- ingest -----------------------------------------------------------------


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--from", "date_from", required=True, help="Start date (YYYY-MM-DD).")
@click.option("--to", "date_to", required=True, help="End date (YYYY-MM-DD).")
@click.option("--rate", default=2.0, show_default=True, help="Max requests/second.")
@click.option("--parallelism", default=4, show_default=True)
def ingest(
    config_path: str,
    store_path: str,
    date_from: str,
    date_to: str,
    rate: float,
    parallelism: int,
) -> None:
    """Fetch page OCR for the configured newspapers into a local store."""
    config = load_corpus_config(config_path)
    store = CorpusStore(store_path)
    with ChroniclingAmericaClient(rate_limit=rate) as client:
        pages = ingest_corpus(
            client,
            config,
            _parse_date(date_from),
            _parse_date(date_to),
            store,
            parallelism=parallelism,
        )
    click.echo(f"fetched {pages} pages into {store_path}")


# -- snippets -----------------------------------------------------------------


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--keyword", required=True)
@click.option("--forms-file", type=click.Path(exists=True), help="Extra accepted surface forms, one per line.")
@click.option("--window", default=2, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def snippets(store_path: str, keyword: str, forms_file: str | None, window: int, out_path: str) -> None:
    """Extract keyword-anchored line-window snippets from the store."""
    forms = {keyword.lower()}
    if forms_file:
        for line in Path(forms_file).read_text(encoding="utf-8").splitlines():
            if line.strip():
                forms.add(line.strip().lower())
    sset = build_snippet_set(load_corpus(store_path), keyword.lower(), forms, window)
    write_snippets_jsonl(sset.snippets, out_path)
    counts = ", ".join(f"{k}={v}" for k, v in sorted(sset.per_newspaper_counts.items()))
    click.echo(f"{len(sset.snippets)} snippets ({counts})")


# -- variants ------------------------------------------------------------------


@main.group()
def variants() -> None:
    """Subword-similarity variant discovery and rule screening."""


@variants.command("train")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--dim", default=64, show_default=True)
@click.option("--min-n", default=3, show_default=True)
@click.option("--max-n", default=6, show_default=True)
@click.option("--epochs", default=3, show_default=True)
@click.option("--window", default=5, show_default=True)
@click.option("--negatives", default=5, show_default=True)
@click.option("--lr", default=0.05, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--min-count", default=5, show_default=True)
@click.option("--buckets", default=1 << 16, show_default=True)
def variants_train(
    store_path: str,
    out_path: str,
    dim: int,
    min_n: int,
    max_n: int,
    epochs: int,
    window: int,
    negatives: int,
    lr: float,
    seed: int,
    min_count: int,
    buckets: int,
) -> None:
    """Train the character n-gram model on all page text in the store."""
    sentences = []
    for page in load_corpus(store_path):
        for line in page.lines:
            tokens = [t.strip(".,;:!?'\"()[]").lower() for t in line.split()]
            tokens = [t for t in tokens if t]
            if tokens:
                sentences.append(tokens)
    params = SubwordParams(
        dim=dim,
        min_n=min_n,
        max_n=max_n,
        epochs=epochs,
        window=window,
        negatives=negatives,
        lr=lr,
        seed=seed,
        min_count=min_count,
        bucket_count=buckets,
    )
    model = train_subword_model(sentences, params)
    save_subword_model(model, out_path)
    click.echo(f"trained on {len(sentences)} lines; vocabulary {len(model.tokens)}")


@variants.command("rank")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--keyword", required=True)
@click.option("-k", default=50, show_default=True)
@click.option("--lexicons", type=click.Path(exists=True), help="Lexicon directory (default: bundled).")
@click.option("--strict-alg1", is_flag=True, help="Automated mode: unreviewable candidates are excluded.")
@click.option("--out", "out_path", required=True, type=click.Path())
def variants_rank(
    model_path: str,
    keyword: str,
    k: int,
    lexicons: str | None,
    strict_alg1: bool,
    out_path: str,
) -> None:
    """Rank keyword-similar forms and screen them with the rule filter."""
    model = load_subword_model(model_path)
    lex = RuleLexicons.load(lexicons) if lexicons else RuleLexicons.bundled()
    ranked = rank_similar_forms(model, keyword.lower(), k)
    candidates = build_candidates(ranked, keyword.lower(), lex, strict=strict_alg1)
    write_candidates_jsonl(candidates, out_path)
    included = sum(1 for c in candidates if c.included)
    click.echo(f"{len(candidates)} candidates, {included} auto-included")


@variants.command("classify")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--lexicons", type=click.Path(exists=True), help="Lexicon directory (default: bundled).")
@click.option("--strict-alg1", is_flag=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def variants_classify(in_path: str, lexicons: str | None, strict_alg1: bool, out_path: str) -> None:
    """Re-apply the rule filter to an existing candidate file."""
    from dataclasses import replace

    lex = RuleLexicons.load(lexicons) if lexicons else RuleLexicons.bundled()
    updated = []
    for cand in read_candidates_jsonl(in_path):
        decision, fired = classify_candidate(
            cand.surface, cand.keyword, lex, strict=strict_alg1
        )
        updated.append(replace(cand, rule_decision=decision, rule_fired=fired))
    write_candidates_jsonl(updated, out_path)
    click.echo(f"reclassified {len(updated)} candidates")


# -- dedupe ---------------------------------------------------------------------


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--n", default=5, show_default=True, help="Shingle size in tokens.")
@click.option("--threshold", default=3, show_default=True, help="Reprint when shared shingles exceed this.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--report", "report_path", required=True, type=click.Path())
def dedupe(in_path: str, n: int, threshold: int, out_path: str, report_path: str) -> None:
    """Drop reprints, keeping the earliest copy of each group."""
    snippets_in = read_snippets_jsonl(in_path)
    kept, report = dedupe_snippets(snippets_in, n=n, threshold=threshold)
    write_snippets_jsonl(kept, out_path)
    report.save(report_path)
    click.echo(f"kept {len(kept)} of {len(snippets_in)} snippets")


# -- embedding --------------------------------------------------------------------


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True), help="Deduplicated snippets (JSONL).")
@click.option("--mode", type=click.Choice(["cbow", "skipgram"]), default="skipgram", show_default=True)
@click.option("--dim", default=100, show_default=True)
@click.option("--window", default=5, show_default=True)
@click.option("--negatives", default=5, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--lr-start", default=0.025, show_default=True)
@click.option("--lr-end", default=0.0001, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--subsample", default=1e-3, show_default=True)
@click.option("--min-count", default=10, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--export", "export_path", type=click.Path(), help="Also write a plain-text vector export.")
def train(
    in_path: str,
    mode: str,
    dim: int,
    window: int,
    negatives: int,
    epochs: int,
    lr_start: float,
    lr_end: float,
    seed: int,
    subsample: float,
    min_count: int,
    out_path: str,
    export_path: str | None,
) -> None:
    """Preprocess snippets and train word embeddings."""
    stopwords = default_stopwords()
    lemmatizer = RuleLemmatizer()
    tokenized = [
        preprocess_snippet(s.snippet_id, s.text, stopwords, lemmatizer, s.lccn)
        for s in read_snippets_jsonl(in_path)
    ]
    vocab = build_vocab((t.tokens for t in tokenized), min_count)
    hp = Hyperparams(
        mode=mode,  # type: ignore[arg-type]
        dim=dim,
        window=window,
        negatives=negatives,
        epochs=epochs,
        lr_start=lr_start,
        lr_end=lr_end,
        seed=seed,
        subsample_threshold=subsample,
    )
    model = train_embeddings([vocab.encode(t.tokens) for t in tokenized], vocab, hp)
    save_model(model, out_path)
    if export_path:
        export_text(model, export_path)
    losses = ", ".join(f"{x:.4f}" for x in model.epoch_losses)
    click.echo(f"vocabulary {len(vocab)}; epoch losses: {losses}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--word", required=True)
@click.option("-k", default=20, show_default=True)
def neighbors(model_path: str, word: str, k: int) -> None:
    """Nearest neighbors by cosine over the input vectors."""
    model = load_model(model_path)
    for token, cosine in nearest_neighbors(model, word.lower(), k):
        click.echo(f"{token}\t{cosine:.4f}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--target", required=True)
@click.option("--contrast", required=True)
@click.option("-k", default=20, show_default=True)
@click.option("--mode", type=click.Choice(["score_diff", "vector_diff"]), default="score_diff", show_default=True)
def contrast(model_path: str, target: str, contrast: str, k: int, mode: str) -> None:
    """Neighbors of the target word net of a contrast word."""
    model = load_model(model_path)
    ranked = contrastive_neighbors(model, target.lower(), contrast.lower(), k, mode)  # type: ignore[arg-type]
    for token, score in ranked:
        click.echo(f"{token}\t{score:.4f}")


# -- log-odds ----------------------------------------------------------------------


@main.command()
@click.option("--north", "north_path", required=True, type=click.Path(exists=True))
@click.option("--south", "south_path", required=True, type=click.Path(exists=True))
@click.option("--prior", "prior_path", required=True, type=click.Path(exists=True))
@click.option("--scale", default=1.0, show_default=True, help="Prior scaling factor.")
@click.option("--out", "out_path", required=True, type=click.Path())
def logodds(north_path: str, south_path: str, prior_path: str, scale: float, out_path: str) -> None:
    """Dirichlet-prior log-odds between two count tables."""
    north = CountTable.load(north_path)
    south = CountTable.load(south_path)
    prior = PriorModel.from_table(CountTable.load(prior_path), scale)
    entries = classify_over_representation(
        log_odds_informative_dirichlet(north, south, prior)
    )
    lines = ["word,y_north,y_south,delta,variance,z,total_frequency,side"]
    for e in entries:
        lines.append(
            f"{e.word},{e.y_i},{e.y_j},{e.delta:.10g},{e.variance:.10g},"
            f"{e.z:.10g},{e.total_frequency},{e.side}"
        )
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(f"scored {len(entries)} words")


# -- annotation -----------------------------------------------------------------------


@main.group()
def annotate() -> None:
    """Human adjudication of variant candidates."""


@annotate.command("serve")
@click.option("--candidates", "candidates_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8710, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--annotators", default="a,b", show_default=True, help="Two comma-separated annotator ids.")
@click.option("--keyword", default="", help="Keyword the candidates belong to.")
@click.option("--sessions-dir", default="annotation-sessions", show_default=True, type=click.Path())
@click.option("--store", "store_path", type=click.Path(exists=True), help="Corpus store; harvests up to 3 context snippets per candidate.")
def annotate_serve(
    candidates_path: str,
    port: int,
    host: str,
    annotators: str,
    keyword: str,
    sessions_dir: str,
    store_path: str | None,
) -> None:
    """Create a session for a candidate file and serve the API + UI."""
    import uvicorn

    store = SessionStore(sessions_dir)
    candidates = read_candidates_jsonl(candidates_path)
    pending = [c for c in candidates if c.rule_decision.value == "needs_review"]
    if not pending:
        pending = candidates
    examples: dict[str, list[str]] = {}
    if store_path:
        from .snippets import extract_snippet, scan_keyword_lines

        surfaces = {c.surface for c in pending}
        for page in load_corpus(store_path):
            for anchor, form in scan_keyword_lines(page, surfaces):
                bucket = examples.setdefault(form, [])
                if len(bucket) < 3:
                    snip = extract_snippet(
                        page, anchor, 1, keyword=form, matched_form=form
                    )
                    bucket.append(snip.text)
    ids = [a.strip() for a in annotators.split(",") if a.strip()]
    session_id = store.create_session(
        pending,
        ids,
        keyword or (candidates[0].keyword if candidates else ""),
        examples=examples,
    )
    ui_dir = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    app = create_app(store, ui_dir=ui_dir if ui_dir.is_dir() else None)
    click.echo(f"session {session_id}: {len(pending)} candidates for {ids}")
    click.echo(f"annotator UI: http://{host}:{port}/ui/?session={session_id}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


# -- pipeline ------------------------------------------------------------------------


@main.group()
def pipeline() -> None:
    """Whole-pipeline orchestration with stage caching."""


@pipeline.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--stages", default="", help="Comma-separated subset of stages to run.")
@click.option("--deterministic", is_flag=True, help="Pin manifest timestamps; reproducible bytes.")
def pipeline_run(config_path: str, stages: str, deterministic: bool) -> None:
    """Run the pipeline described by a config file."""
    try:
        config = load_pipeline_config(config_path)
    except (ConfigurationError, OSError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    wanted = [s.strip() for s in stages.split(",") if s.strip()] or None
    try:
        manifest = run_pipeline(config, stages=wanted, deterministic=deterministic)
    except AwaitingAnnotation as exc:
        click.echo(f"awaiting annotation: {exc}", err=True)
        click.echo("run `discoursekit annotate serve --candidates <file>` and export, then re-run", err=True)
        sys.exit(4)
    except ConfigurationError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except (StageError, DiscourseKitError) as exc:
        click.echo(f"stage failure: {exc}", err=True)
        sys.exit(3)
    click.echo(f"done; manifest at {config.out / 'manifest.json'}")
    for name, record in manifest.stages.items():
        click.echo(f"  {name}: {len(record.get('outputs', {}))} outputs")


@pipeline.command("fixture")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", default=7, show_default=True)
def pipeline_fixture(out_path: str, seed: int) -> None:
    """Materialize the bundled synthetic fixture corpus."""
    plan = build_fixture_corpus(out_path, seed=seed)
    click.echo(f"fixture corpus at {plan.store_root}")
    click.echo(f"pipeline config at {plan.pipeline_config}")


if __name__ == "__main__":
    main()

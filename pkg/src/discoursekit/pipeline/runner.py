"""Stage-by-stage pipeline execution with content-hash caching.

Stages run in dependency order; a stage is skipped when its parameters,
input hashes, and output hashes all match the previous run's manifest.
Failures preserve completed caches.  The annotate stage, in service
mode, stops the run with an awaiting-annotation state that a later run
picks up once the adjudicated files exist.

In deterministic mode manifest timestamps are pinned to the epoch so
that identical runs produce byte-identical manifests.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .. import __version__
from ..corpus.client import ChroniclingAmericaClient, ingest_corpus
from ..corpus.store import CorpusStore, PageDocument
from ..dedupe import dedupe_snippets
from ..embedding.model import (
    contrastive_neighbors,
    load_model,
    nearest_neighbors,
    save_model,
)
from ..embedding.preprocess import (
    RuleLemmatizer,
    default_stopwords,
    load_stopwords,
    preprocess_snippet,
)
from ..embedding.train import train_embeddings
from ..embedding.vocab import build_vocab
from ..errors import (
    ConfigurationError,
    DependencyError,
    DiscourseKitError,
    StageError,
)
from ..snippets import build_snippet_set, read_snippets_jsonl, write_snippets_jsonl
from ..stats import (
    CountTable,
    PriorModel,
    classify_over_representation,
    count_tokens,
    log_odds_informative_dirichlet,
)
from ..variants.candidates import (
    build_candidates,
    expand_keyword_set,
    read_candidates_jsonl,
    write_candidates_jsonl,
)
from ..variants.metrics import candidate_stats
from ..variants.rules import RuleLexicons
from ..variants.subword import rank_similar_forms, train_subword_model
from .config import PipelineConfig
from .report import emit_report

__all__ = ["AwaitingAnnotation", "RunManifest", "STAGE_ORDER", "run_pipeline"]

log = logging.getLogger(__name__)

STAGE_ORDER = (
    "ingest",
    "snippets",
    "variants",
    "annotate",
    "reextract",
    "dedupe",
    "train",
    "rankings",
    "counts",
    "logodds",
    "report",
)

_EPOCH = "1970-01-01T00:00:00+00:00"


class AwaitingAnnotation(DiscourseKitError):
    """The run stopped at the annotate stage; adjudication is pending."""

    def __init__(self, candidates: list[Path]) -> None:
        names = ", ".join(str(p) for p in candidates)
        super().__init__(f"awaiting human adjudication of: {names}")
        self.candidates = candidates


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    deterministic: bool
    stages: dict[str, dict] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "config_hash": self.config_hash,
                "tool_version": self.tool_version,
                "deterministic": self.deterministic,
                "stages": self.stages,
            },
            ensure_ascii=False,
            sort_keys=True,
            indent=1,
        )

    def save(self, path: Path) -> None:
        path.write_text(self.to_json() + "\n", encoding="utf-8")

    @staticmethod
    def load(path: Path) -> "RunManifest":
        raw = json.loads(path.read_text(encoding="utf-8"))
        return RunManifest(
            config_hash=raw["config_hash"],
            tool_version=raw["tool_version"],
            deterministic=raw["deterministic"],
            stages=raw["stages"],
        )


def _sha256(path: Path) -> str:
    """Content hash of a file, or of a directory's files (sorted)."""
    digest = hashlib.sha256()
    files = sorted(path.rglob("*")) if path.is_dir() else [path]
    for item in files:
        if not item.is_file():
            continue
        digest.update(item.name.encode())
        with open(item, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                digest.update(chunk)
    return digest.hexdigest()


class _Run:
    def __init__(
        self,
        config: PipelineConfig,
        deterministic: bool,
        client: ChroniclingAmericaClient | None = None,
    ) -> None:
        self.cfg = config
        self.deterministic = deterministic
        self.client = client
        self.out = config.out
        self.out.mkdir(parents=True, exist_ok=True)
        self.store = CorpusStore(config.store)
        self.lexicons = (
            RuleLexicons.load(config.lexicons)
            if config.lexicons
            else RuleLexicons.bundled()
        )
        self.stopwords = (
            load_stopwords(config.stopwords) if config.stopwords else default_stopwords()
        )
        self.lemmatizer = RuleLemmatizer()
        previous_path = self.out / "manifest.json"
        self.previous = (
            RunManifest.load(previous_path) if previous_path.exists() else None
        )
        self.manifest = RunManifest(
            config_hash=config.config_hash,
            tool_version=__version__,
            deterministic=deterministic,
        )
        self._pages_cache: list[PageDocument] | None = None

    # -- helpers -----------------------------------------------------------

    def _now(self) -> str:
        if self.deterministic:
            return _EPOCH
        return datetime.now(timezone.utc).isoformat()

    def path(self, *parts: str) -> Path:
        p = self.out.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def rel(self, path: Path) -> str:
        try:
            return str(path.relative_to(self.out))
        except ValueError:
            return f"store:{path.name}"

    def pages(self) -> list[PageDocument]:
        if self._pages_cache is None:
            self._pages_cache = [
                p
                for p in self.store.load()
                if self.cfg.date_from <= p.issue_date <= self.cfg.date_to
            ]
        return self._pages_cache

    # -- stage definitions ---------------------------------------------------

    def stage_inputs(self, name: str) -> list[tuple[Path, str]]:
        kw = self.cfg.keywords
        papers = sorted(self.cfg.newspapers)
        store_manifest = self.cfg.store / "manifest.json"
        table: dict[str, list[tuple[Path, str]]] = {
            "ingest": [],
            "snippets": [(store_manifest, "ingest")],
            "variants": [(store_manifest, "ingest")]
            + [(self.path("snippets", f"{k}.jsonl"), "snippets") for k in kw],
            "annotate": [
                (self.path("variants", f"{k}-candidates.jsonl"), "variants") for k in kw
            ],
            "reextract": [(store_manifest, "ingest")]
            + [(self.path("annotate", f"{k}-adjudicated.jsonl"), "annotate") for k in kw],
            "dedupe": [(self.path("reextract", f"{k}.jsonl"), "reextract") for k in kw],
            "train": [(self.path("dedupe", f"{k}.jsonl"), "dedupe") for k in kw],
            "rankings": [(self.path("train", f"{p}.model"), "train") for p in papers],
            "counts": [(self.path("dedupe", f"{k}.jsonl"), "dedupe") for k in kw],
            "logodds": [
                (self.path("counts", f"{label}.json"), "counts")
                for label in ("north", "south", "all")
            ],
            "report": [(self.path("logodds", "entries.csv"), "logodds")]
            + [
                (self.path("rankings", f"{k}-{p}.csv"), "rankings")
                for k in kw
                for p in papers
            ]
            + [(self.path("dedupe", f"{k}-report.json"), "dedupe") for k in kw],
        }
        return table[name]

    def stage_outputs(self, name: str) -> list[Path]:
        kw = self.cfg.keywords
        papers = sorted(self.cfg.newspapers)
        table: dict[str, list[Path]] = {
            # In api mode the store is this stage's product, so deleting
            # it invalidates the cache and triggers a re-crawl.
            "ingest": (
                [self.cfg.store / "manifest.json"] if self.cfg.source == "api" else []
            ),
            "snippets": [self.path("snippets", f"{k}.jsonl") for k in kw],
            "variants": [self.path("variants", f"{k}-candidates.jsonl") for k in kw]
            + [self.path("variants", f"{k}-stats.json") for k in kw],
            "annotate": [self.path("annotate", f"{k}-adjudicated.jsonl") for k in kw],
            "reextract": [self.path("reextract", f"{k}.jsonl") for k in kw],
            "dedupe": [self.path("dedupe", f"{k}.jsonl") for k in kw]
            + [self.path("dedupe", f"{k}-report.json") for k in kw],
            "train": [self.path("train", f"{p}.model") for p in papers],
            "rankings": [
                self.path("rankings", f"{k}-{p}.csv") for k in kw for p in papers
            ],
            "counts": [
                self.path("counts", f"{label}.json")
                for label in ("north", "south", "all")
            ],
            "logodds": [self.path("logodds", "entries.csv")],
            "report": [self.path("report", f"scatter_{k}.csv") for k in kw]
            + [self.path("report", f"scatter_{k}_extended.csv") for k in kw]
            + [self.path("report", f"rankings_{k}.csv") for k in kw]
            + [self.path("report", f"prevalence_{k}.csv") for k in kw]
            + [self.path("report", "dedup_report.json")],
        }
        return table[name]

    def stage_params(self, name: str) -> dict:
        cfg = self.cfg
        common = {"keywords": cfg.keywords, "seed": cfg.seed}
        # Data-file knobs enter the cache key by content, so editing a
        # lexicon or stopword file invalidates the stages that read it.
        lexicons_key = _sha256(cfg.lexicons) if cfg.lexicons else "bundled"
        stopwords_key = _sha256(cfg.stopwords) if cfg.stopwords else "bundled"
        per_stage: dict[str, dict] = {
            "ingest": {
                "source": cfg.source,
                "date_from": str(cfg.date_from),
                "date_to": str(cfg.date_to),
                "pages": cfg.corpus.pages,
            },
            "snippets": {"window": cfg.window, "date_from": str(cfg.date_from), "date_to": str(cfg.date_to)},
            "variants": {
                "k": cfg.variants_k,
                "subword": cfg.subword.__dict__,
                "lexicons": lexicons_key,
            },
            "annotate": {"adjudication": cfg.adjudication},
            "reextract": {"window": cfg.window},
            "dedupe": {"n": cfg.shingle_n, "threshold": cfg.dedupe_threshold},
            "train": {
                "embedding": cfg.embedding.__dict__,
                "min_count": cfg.embedding_min_count,
                "stopwords": stopwords_key,
            },
            "rankings": {"k": cfg.discourse_k, "contrast_mode": cfg.contrast_mode},
            "counts": {"stopwords": stopwords_key},
            "logodds": {"prior_scale": cfg.prior_scale},
            "report": {"k": cfg.discourse_k},
        }
        return {**common, **per_stage[name]}

    # -- stage bodies -----------------------------------------------------

    def run_ingest(self) -> None:
        manifest_path = self.cfg.store / "manifest.json"
        if self.cfg.source == "local":
            if not manifest_path.exists():
                raise ConfigurationError(
                    f"corpus.source is 'local' but no store at {self.cfg.store}"
                )
            return
        if self.client is None:
            self.client = ChroniclingAmericaClient(
                rate_limit=self.cfg.rate,
                retries=self.cfg.retries,
                backoff=self.cfg.backoff,
            )
        ingest_corpus(
            self.client,
            self.cfg.corpus,
            self.cfg.date_from,
            self.cfg.date_to,
            self.store,
            parallelism=self.cfg.parallelism,
        )

    def run_snippets(self) -> None:
        for keyword in self.cfg.keywords:
            sset = build_snippet_set(self.pages(), keyword, {keyword}, self.cfg.window)
            write_snippets_jsonl(sset.snippets, self.path("snippets", f"{keyword}.jsonl"))

    def _page_tokens(self) -> list[list[str]]:
        out = []
        for page in self.pages():
            for line in page.lines:
                tokens = [t.strip(".,;:!?'\"()[]").lower() for t in line.split()]
                tokens = [t for t in tokens if t]
                if tokens:
                    out.append(tokens)
        return out

    def run_variants(self) -> None:
        model = train_subword_model(self._page_tokens(), self.cfg.subword)
        for keyword in self.cfg.keywords:
            ranked = rank_similar_forms(model, keyword, self.cfg.variants_k)
            candidates = build_candidates(ranked, keyword, self.lexicons)
            write_candidates_jsonl(
                candidates, self.path("variants", f"{keyword}-candidates.jsonl")
            )
            ratios = [c.similarity_ratio for c in candidates]
            distances = [c.levenshtein for c in candidates]
            if candidates:
                ratio_mean, ratio_sd = candidate_stats(ratios)
                dist_mean, dist_sd = candidate_stats(distances)
            else:
                ratio_mean = ratio_sd = dist_mean = dist_sd = 0.0
            self.path("variants", f"{keyword}-stats.json").write_text(
                json.dumps(
                    {
                        "keyword": keyword,
                        "candidate_count": len(candidates),
                        "similarity_ratio_mean": ratio_mean,
                        "similarity_ratio_sd": ratio_sd,
                        "levenshtein_mean": dist_mean,
                        "levenshtein_sd": dist_sd,
                    },
                    sort_keys=True,
                    indent=1,
                )
                + "\n",
                encoding="utf-8",
            )

    def run_annotate(self) -> None:
        pending: list[Path] = []
        for keyword in self.cfg.keywords:
            out_path = self.path("annotate", f"{keyword}-adjudicated.jsonl")
            candidates = read_candidates_jsonl(
                self.path("variants", f"{keyword}-candidates.jsonl")
            )
            if self.cfg.adjudication == "strict_rules":
                # Literal automated mode: needs_review maps to exclude.
                adjudicated = [
                    c.with_label("include" if c.included else "exclude")
                    for c in candidates
                ]
                write_candidates_jsonl(adjudicated, out_path)
            else:
                if out_path.exists():
                    continue  # adjudication arrived from the service
                pending.append(self.path("variants", f"{keyword}-candidates.jsonl"))
        if pending:
            state = self.path("awaiting-annotation.json")
            state.write_text(
                json.dumps({"candidates": [str(p) for p in pending]}, indent=1) + "\n",
                encoding="utf-8",
            )
            raise AwaitingAnnotation(pending)

    def run_reextract(self) -> None:
        for keyword in self.cfg.keywords:
            adjudicated = read_candidates_jsonl(
                self.path("annotate", f"{keyword}-adjudicated.jsonl")
            )
            forms = expand_keyword_set(keyword, adjudicated)
            sset = build_snippet_set(self.pages(), keyword, forms, self.cfg.window)
            write_snippets_jsonl(sset.snippets, self.path("reextract", f"{keyword}.jsonl"))

    def run_dedupe(self) -> None:
        for keyword in self.cfg.keywords:
            snippets = read_snippets_jsonl(self.path("reextract", f"{keyword}.jsonl"))
            kept, report = dedupe_snippets(
                snippets, n=self.cfg.shingle_n, threshold=self.cfg.dedupe_threshold
            )
            write_snippets_jsonl(kept, self.path("dedupe", f"{keyword}.jsonl"))
            report.save(self.path("dedupe", f"{keyword}-report.json"))

    def _deduped_snippets(self) -> list:
        snippets = []
        for keyword in self.cfg.keywords:
            snippets.extend(read_snippets_jsonl(self.path("dedupe", f"{keyword}.jsonl")))
        return snippets

    def run_train(self) -> None:
        by_paper: dict[str, list] = {lccn: [] for lccn in self.cfg.newspapers}
        for snip in self._deduped_snippets():
            by_paper[snip.lccn].append(snip)
        for lccn in sorted(self.cfg.newspapers):
            snippets = by_paper[lccn]
            tokenized = [
                preprocess_snippet(
                    s.snippet_id, s.text, self.stopwords, self.lemmatizer, s.lccn
                )
                for s in snippets
            ]
            vocab = build_vocab(
                (t.tokens for t in tokenized), self.cfg.embedding_min_count
            )
            hp = replace(self.cfg.embedding, seed=self.cfg.model_seed(lccn))
            sequences = [vocab.encode(t.tokens) for t in tokenized]
            model = train_embeddings(sequences, vocab, hp)
            save_model(model, self.path("train", f"{lccn}.model"))

    def run_rankings(self) -> None:
        contrast_for = {}
        if len(self.cfg.keywords) >= 2:
            contrast_for = {
                self.cfg.keywords[0]: self.cfg.keywords[1],
                self.cfg.keywords[1]: self.cfg.keywords[0],
            }
        for lccn in sorted(self.cfg.newspapers):
            model = load_model(self.path("train", f"{lccn}.model"))
            for keyword in self.cfg.keywords:
                contrast = contrast_for.get(keyword)
                if contrast is not None:
                    ranked = contrastive_neighbors(
                        model,
                        keyword,
                        contrast,
                        self.cfg.discourse_k,
                        self.cfg.contrast_mode,  # type: ignore[arg-type]
                    )
                else:
                    ranked = nearest_neighbors(model, keyword, self.cfg.discourse_k)
                lines = ["word,score"] + [
                    f"{word},{score:.6f}" for word, score in ranked
                ]
                self.path("rankings", f"{keyword}-{lccn}.csv").write_text(
                    "\n".join(lines) + "\n", encoding="utf-8"
                )

    def run_counts(self) -> None:
        regions = self.cfg.corpus.regions()
        tokenized = [
            preprocess_snippet(s.snippet_id, s.text, self.stopwords, self.lemmatizer, s.lccn)
            for s in self._deduped_snippets()
        ]
        tables = count_tokens(tokenized, regions)
        for label in ("north", "south"):
            tables.setdefault(label, CountTable(label)).save(
                self.path("counts", f"{label}.json")
            )
        tables["all"].save(self.path("counts", "all.json"))

    def run_logodds(self) -> None:
        north = CountTable.load(self.path("counts", "north.json"))
        south = CountTable.load(self.path("counts", "south.json"))
        combined = CountTable.load(self.path("counts", "all.json"))
        prior = PriorModel.from_table(combined, self.cfg.prior_scale)
        entries = classify_over_representation(
            log_odds_informative_dirichlet(north, south, prior)
        )
        lines = ["word,y_north,y_south,delta,variance,z,total_frequency,side"]
        for e in entries:
            lines.append(
                f"{e.word},{e.y_i},{e.y_j},{e.delta:.10g},{e.variance:.10g},"
                f"{e.z:.10g},{e.total_frequency},{e.side}"
            )
        self.path("logodds", "entries.csv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )

    def run_report(self) -> None:
        emit_report(self)

    # -- orchestration -------------------------------------------------------

    def execute(self, requested: list[str] | None) -> RunManifest:
        requested_set = set(requested) if requested else set(STAGE_ORDER)
        unknown = requested_set - set(STAGE_ORDER)
        if unknown:
            raise ConfigurationError(f"unknown stages {sorted(unknown)}")
        bodies = {
            "ingest": self.run_ingest,
            "snippets": self.run_snippets,
            "variants": self.run_variants,
            "annotate": self.run_annotate,
            "reextract": self.run_reextract,
            "dedupe": self.run_dedupe,
            "train": self.run_train,
            "rankings": self.run_rankings,
            "counts": self.run_counts,
            "logodds": self.run_logodds,
            "report": self.run_report,
        }
        try:
            for name in STAGE_ORDER:
                if name not in requested_set:
                    carried = (self.previous.stages if self.previous else {}).get(name)
                    if carried is not None:
                        self.manifest.stages[name] = carried
                    continue
                self._execute_stage(name, bodies[name])
        finally:
            self.manifest.save(self.out / "manifest.json")
        awaiting = self.out / "awaiting-annotation.json"
        if awaiting.exists() and "reextract" in self.manifest.stages:
            awaiting.unlink()
        return self.manifest

    def _execute_stage(self, name: str, body) -> None:
        inputs = self.stage_inputs(name)
        for path, producer in inputs:
            if not path.exists():
                raise DependencyError(name, producer, self.rel(path))
        input_hashes = {self.rel(p): _sha256(p) for p, _ in inputs}
        params = self.stage_params(name)
        record = {
            "params": params,
            "inputs": input_hashes,
            "outputs": {},
            "started_at": self._now(),
            "finished_at": self._now(),
        }
        previous = (self.previous.stages if self.previous else {}).get(name)
        outputs = self.stage_outputs(name)
        if previous is not None and previous.get("params") == params and previous.get(
            "inputs"
        ) == input_hashes:
            if all(p.exists() for p in outputs) and {
                self.rel(p): _sha256(p) for p in outputs
            } == previous.get("outputs"):
                log.info("stage %s: cached, skipping", name)
                record["outputs"] = previous["outputs"]
                self.manifest.stages[name] = record
                return
        log.info("stage %s: running", name)
        record["started_at"] = self._now()
        try:
            body()
        except (AwaitingAnnotation, DependencyError, ConfigurationError):
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        record["finished_at"] = self._now()
        record["outputs"] = {self.rel(p): _sha256(p) for p in self.stage_outputs(name)}
        self.manifest.stages[name] = record


def run_pipeline(
    config: PipelineConfig,
    stages: list[str] | None = None,
    deterministic: bool = False,
    client: ChroniclingAmericaClient | None = None,
) -> RunManifest:
    """Run the requested stages (all by default) and return the manifest."""
    return _Run(config, deterministic, client).execute(stages)

"""One-file pipeline configuration with strict validation.

Every stage knob lives here; there are no hidden defaults elsewhere.
Unknown keys are errors at every level, so a typo never silently falls
back to a default.  Relative paths resolve against the config file's
directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from ..corpus.config import CorpusConfig, NewspaperSpec, parse_newspaper
from ..embedding.model import Hyperparams
from ..errors import ConfigurationError
from ..variants.subword import SubwordParams

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = ["PipelineConfig", "load_pipeline_config"]


def _section(raw: dict, name: str, allowed: set[str]) -> dict:
    data = raw.get(name, {})
    if not isinstance(data, dict):
        raise ConfigurationError(f"[{name}] must be a table")
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"[{name}]: unknown keys {sorted(unknown)}")
    return data


def _coerce_date(value: object, where: str) -> date:
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        return date.fromisoformat(value)
    raise ConfigurationError(f"{where}: expected a date, got {value!r}")


@dataclass
class PipelineConfig:
    # corpus
    store: Path
    source: str  # "local" (pre-fetched store) or "api"
    rate: float
    retries: int
    backoff: float
    parallelism: int
    corpus: CorpusConfig
    # run
    keywords: list[str]
    date_from: date
    date_to: date
    out: Path
    seed: int
    # snippets
    window: int
    # variants
    variants_k: int
    adjudication: str  # "strict_rules" or "service"
    lexicons: Path | None
    subword: SubwordParams
    # dedupe
    shingle_n: int
    dedupe_threshold: int
    # embedding
    embedding: Hyperparams
    embedding_min_count: int
    stopwords: Path | None
    # discourse
    discourse_k: int
    prior_scale: float
    contrast_mode: str

    config_hash: str = ""
    newspapers: dict[str, NewspaperSpec] = field(default_factory=dict)

    def model_seed(self, lccn: str) -> int:
        """Stable per-newspaper training seed derived from the run seed."""
        digest = hashlib.blake2b(
            f"{self.seed}:{lccn}".encode(), digest_size=4
        ).digest()
        return int.from_bytes(digest, "big")


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    base = path.parent

    top_unknown = set(raw) - {"corpus", "run", "snippets", "variants", "dedupe", "embedding", "discourse"}
    if top_unknown:
        raise ConfigurationError(f"{path}: unknown sections {sorted(top_unknown)}")

    corpus_raw = _section(
        raw,
        "corpus",
        {"store", "source", "pages", "rate", "retries", "backoff", "parallelism", "newspapers"},
    )
    entries = corpus_raw.get("newspapers", [])
    if not entries:
        raise ConfigurationError(f"{path}: no [[corpus.newspapers]] entries")
    newspapers: dict[str, NewspaperSpec] = {}
    for i, entry in enumerate(entries):
        spec = parse_newspaper(entry, where=f"corpus.newspapers[{i}]")
        if spec.lccn in newspapers:
            raise ConfigurationError(f"{path}: duplicate lccn {spec.lccn!r}")
        newspapers[spec.lccn] = spec
    pages = corpus_raw.get("pages", "all")
    if pages not in ("all", "first"):
        raise ConfigurationError(f"pages must be 'all' or 'first', got {pages!r}")
    source = corpus_raw.get("source", "local")
    if source not in ("local", "api"):
        raise ConfigurationError(f"source must be 'local' or 'api', got {source!r}")

    run = _section(raw, "run", {"keywords", "date_from", "date_to", "out", "seed"})
    keywords = [k.lower() for k in run.get("keywords", [])]
    if not keywords:
        raise ConfigurationError("run.keywords must list at least one keyword")
    if len(set(keywords)) != len(keywords):
        raise ConfigurationError("run.keywords contains duplicates")

    snippets = _section(raw, "snippets", {"window"})
    window = int(snippets.get("window", 2))
    if window < 0:
        raise ConfigurationError("snippets.window must be non-negative")

    variants = _section(raw, "variants", {"k", "adjudication", "lexicons", "subword"})
    adjudication = variants.get("adjudication", "service")
    if adjudication not in ("strict_rules", "service"):
        raise ConfigurationError(
            f"variants.adjudication must be 'strict_rules' or 'service', got {adjudication!r}"
        )
    subword_raw = _section(
        variants,
        "subword",
        {"dim", "min_n", "max_n", "epochs", "window", "negatives", "lr", "min_count", "bucket_count"},
    )
    seed = int(run.get("seed", 1))
    subword = SubwordParams(
        dim=int(subword_raw.get("dim", 64)),
        min_n=int(subword_raw.get("min_n", 3)),
        max_n=int(subword_raw.get("max_n", 6)),
        epochs=int(subword_raw.get("epochs", 3)),
        window=int(subword_raw.get("window", 5)),
        negatives=int(subword_raw.get("negatives", 5)),
        lr=float(subword_raw.get("lr", 0.05)),
        seed=seed,
        min_count=int(subword_raw.get("min_count", 5)),
        bucket_count=int(subword_raw.get("bucket_count", 1 << 16)),
    )

    dedupe = _section(raw, "dedupe", {"n", "threshold"})

    embedding_raw = _section(
        raw,
        "embedding",
        {
            "mode",
            "dim",
            "window",
            "negatives",
            "epochs",
            "lr_start",
            "lr_end",
            "subsample_threshold",
            "min_count",
            "stopwords",
        },
    )
    mode = embedding_raw.get("mode", "skipgram")
    if mode not in ("cbow", "skipgram"):
        raise ConfigurationError(f"embedding.mode must be 'cbow' or 'skipgram', got {mode!r}")
    embedding = Hyperparams(
        mode=mode,
        dim=int(embedding_raw.get("dim", 100)),
        window=int(embedding_raw.get("window", 5)),
        negatives=int(embedding_raw.get("negatives", 5)),
        epochs=int(embedding_raw.get("epochs", 5)),
        lr_start=float(embedding_raw.get("lr_start", 0.025)),
        lr_end=float(embedding_raw.get("lr_end", 0.0001)),
        seed=seed,
        subsample_threshold=float(embedding_raw.get("subsample_threshold", 1e-3)),
    )

    discourse = _section(raw, "discourse", {"k", "prior_scale", "contrast_mode"})
    contrast_mode = discourse.get("contrast_mode", "score_diff")
    if contrast_mode not in ("score_diff", "vector_diff"):
        raise ConfigurationError(
            f"discourse.contrast_mode must be 'score_diff' or 'vector_diff', got {contrast_mode!r}"
        )

    stopwords_value = embedding_raw.get("stopwords", "")
    lexicons_value = variants.get("lexicons", "")
    canonical = json.dumps(raw, default=str, sort_keys=True)
    return PipelineConfig(
        store=(base / corpus_raw.get("store", "corpus")).resolve(),
        source=source,
        rate=float(corpus_raw.get("rate", 2.0)),
        retries=int(corpus_raw.get("retries", 3)),
        backoff=float(corpus_raw.get("backoff", 0.5)),
        parallelism=int(corpus_raw.get("parallelism", 4)),
        corpus=CorpusConfig(newspapers=newspapers, pages=pages),
        keywords=keywords,
        date_from=_coerce_date(run.get("date_from", date(1850, 1, 1)), "run.date_from"),
        date_to=_coerce_date(run.get("date_to", date(1865, 12, 31)), "run.date_to"),
        out=(base / run.get("out", "out")).resolve(),
        seed=seed,
        window=window,
        variants_k=int(variants.get("k", 50)),
        adjudication=adjudication,
        lexicons=(base / lexicons_value).resolve() if lexicons_value else None,
        subword=subword,
        shingle_n=int(dedupe.get("n", 5)),
        dedupe_threshold=int(dedupe.get("threshold", 3)),
        embedding=embedding,
        embedding_min_count=int(embedding_raw.get("min_count", 10)),
        stopwords=(base / stopwords_value).resolve() if stopwords_value else None,
        discourse_k=int(discourse.get("k", 20)),
        prior_scale=float(discourse.get("prior_scale", 1.0)),
        contrast_mode=contrast_mode,
        config_hash=hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
        newspapers=newspapers,
    )

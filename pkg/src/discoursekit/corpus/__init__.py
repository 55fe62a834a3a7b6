"""Corpus ingestion: API client, newspaper config, and the page store."""

from .client import ChroniclingAmericaClient, IssueRef, RateLimiter, ingest_corpus
from .config import CorpusConfig, NewspaperSpec, Region, Stance, load_corpus_config
from .store import CorpusStore, PageDocument, load_corpus, page_key, persist_corpus

__all__ = [
    "ChroniclingAmericaClient",
    "IssueRef",
    "RateLimiter",
    "ingest_corpus",
    "CorpusConfig",
    "NewspaperSpec",
    "Region",
    "Stance",
    "load_corpus_config",
    "CorpusStore",
    "PageDocument",
    "load_corpus",
    "page_key",
    "persist_corpus",
]

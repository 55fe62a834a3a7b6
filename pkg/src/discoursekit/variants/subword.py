"""Character n-gram subword embeddings for surfacing OCR variants.

Tokens are padded with "<" and ">" boundary markers and decomposed into
character n-grams; each n-gram maps to a bucket by a fixed string hash.
A token is represented by the mean of its own vector and its n-gram
bucket vectors, so unseen surface forms can still be embedded from their
n-grams alone.  Training is skip-gram with negative sampling over the
composed vectors; misrecognized forms share both n-grams and contexts
with the word they corrupt, which pushes them close in the space.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigurationError, PreconditionError

__all__ = [
    "SubwordParams",
    "SubwordModel",
    "char_ngrams",
    "ngram_bucket",
    "train_subword_model",
    "rank_similar_forms",
    "save_subword_model",
    "load_subword_model",
]

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def char_ngrams(token: str, min_n: int, max_n: int) -> list[str]:
    """All character n-grams of the boundary-padded token, shortest first."""
    padded = f"<{token}>"
    grams: list[str] = []
    for n in range(min_n, max_n + 1):
        if n > len(padded):
            break
        grams.extend(padded[i : i + n] for i in range(len(padded) - n + 1))
    return grams


def ngram_bucket(gram: str, bucket_count: int) -> int:
    """Bucket index for an n-gram; a pure function of the string."""
    return _fnv1a_64(gram.encode("utf-8")) % bucket_count


@dataclass(frozen=True)
class SubwordParams:
    dim: int = 100
    min_n: int = 3
    max_n: int = 6
    epochs: int = 5
    window: int = 5
    negatives: int = 5
    lr: float = 0.05
    seed: int = 1
    min_count: int = 1
    bucket_count: int = 1 << 16


@dataclass
class SubwordModel:
    """Trained subword space: token table plus shared n-gram buckets."""

    vocabulary: dict[str, int]
    tokens: list[str]
    counts: list[int]
    token_vectors: np.ndarray
    ngram_vectors: np.ndarray
    output_vectors: np.ndarray
    ngram_range: tuple[int, int]
    dim: int
    bucket_count: int
    _bucket_cache: dict[str, list[int]] = field(default_factory=dict, repr=False)

    def bucket_ids(self, token: str) -> list[int]:
        ids = self._bucket_cache.get(token)
        if ids is None:
            min_n, max_n = self.ngram_range
            ids = [ngram_bucket(g, self.bucket_count) for g in char_ngrams(token, min_n, max_n)]
            self._bucket_cache[token] = ids
        return ids

    def compose(self, token: str) -> np.ndarray:
        """Mean of the token vector and its n-gram bucket vectors.

        Out-of-vocabulary surfaces compose from n-gram buckets alone.
        """
        buckets = self.bucket_ids(token)
        idx = self.vocabulary.get(token)
        if idx is None:
            if not buckets:
                raise PreconditionError(f"cannot compose a vector for {token!r}")
            return self.ngram_vectors[buckets].mean(axis=0)
        parts = self.ngram_vectors[buckets].sum(axis=0) + self.token_vectors[idx]
        return parts / (len(buckets) + 1)


def _unigram_cumulative(counts: Sequence[int]) -> np.ndarray:
    weights = np.asarray(counts, dtype=np.float64) ** 0.75
    cumulative = np.cumsum(weights)
    return cumulative / cumulative[-1]


def _subword_span(
    encoded: Sequence[Sequence[int]],
    model: SubwordModel,
    bucket_lists: list[list[int]],
    cumulative: np.ndarray,
    params: SubwordParams,
    rng: np.random.Generator,
    total_positions: int,
    processed: int,
) -> int:
    """One pass over ``encoded`` sentences; returns the processed count."""
    for sent in encoded:
        for pos, center in enumerate(sent):
            lr = params.lr * max(1e-4, 1.0 - processed / total_positions)
            processed += 1
            span = int(rng.integers(1, params.window + 1))
            lo = max(0, pos - span)
            hi = min(len(sent), pos + span + 1)
            contexts = [sent[j] for j in range(lo, hi) if j != pos]
            if not contexts:
                continue
            buckets = bucket_lists[center]
            k = len(buckets) + 1
            h = (
                model.ngram_vectors[buckets].sum(axis=0) + model.token_vectors[center]
            ) / k
            for target in contexts:
                draws = rng.random(params.negatives)
                negs = np.searchsorted(cumulative, draws)
                rows = [target] + [int(n) for n in negs if int(n) != target]
                labels = np.zeros(len(rows))
                labels[0] = 1.0
                outs = model.output_vectors[rows]
                scores = 1.0 / (1.0 + np.exp(-outs @ h))
                err = scores - labels
                g_h = err @ outs
                model.output_vectors[rows] -= lr * err[:, None] * h[None, :]
                step = (lr / k) * g_h
                model.token_vectors[center] -= step
                np.subtract.at(model.ngram_vectors, buckets, step)
    return processed


def train_subword_model(
    sentences: Iterable[Sequence[str]],
    params: SubwordParams = SubwordParams(),
    workers: int = 1,
) -> SubwordModel:
    """Train the subword space on an iterable of token sequences.

    Deterministic for a fixed seed with ``workers=1`` (the contractual
    mode); ``workers>1`` shares the tables across threads without locks
    and is nondeterministic.  Tokens occurring fewer than ``min_count``
    times are dropped from the vocabulary; sequences close up around
    them.  Learning rate decays linearly to zero over the run.
    """
    if workers < 1:
        raise PreconditionError("workers must be >= 1")
    corpus = [list(s) for s in sentences]
    freq: dict[str, int] = {}
    for sent in corpus:
        for tok in sent:
            freq[tok] = freq.get(tok, 0) + 1
    kept = sorted(
        (t for t, c in freq.items() if c >= params.min_count),
        key=lambda t: (-freq[t], t),
    )
    if not kept:
        raise ConfigurationError(
            f"no tokens left after min_count={params.min_count} filtering"
        )
    vocab = {t: i for i, t in enumerate(kept)}
    counts = [freq[t] for t in kept]

    rng = np.random.default_rng(params.seed)
    bound = 0.5 / params.dim
    token_vectors = rng.uniform(-bound, bound, (len(kept), params.dim))
    ngram_vectors = rng.uniform(-bound, bound, (params.bucket_count, params.dim))
    output_vectors = rng.uniform(-bound, bound, (len(kept), params.dim))

    model = SubwordModel(
        vocabulary=vocab,
        tokens=kept,
        counts=counts,
        token_vectors=token_vectors,
        ngram_vectors=ngram_vectors,
        output_vectors=output_vectors,
        ngram_range=(params.min_n, params.max_n),
        dim=params.dim,
        bucket_count=params.bucket_count,
    )

    encoded = [[vocab[t] for t in sent if t in vocab] for sent in corpus]
    encoded = [s for s in encoded if len(s) >= 2]
    bucket_lists = [model.bucket_ids(t) for t in kept]
    cumulative = _unigram_cumulative(counts)
    total_positions = max(1, sum(len(s) for s in encoded) * max(params.epochs, 1))

    if workers == 1:
        processed = 0
        for _epoch in range(params.epochs):
            processed = _subword_span(
                encoded, model, bucket_lists, cumulative, params, rng,
                total_positions, processed,
            )
    else:
        chunks = [encoded[w::workers] for w in range(workers)]
        chunk_total = max(1, total_positions // workers)
        processed_per = [0] * workers
        for epoch in range(params.epochs):
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(
                        _subword_span,
                        chunks[w],
                        model,
                        bucket_lists,
                        cumulative,
                        params,
                        np.random.default_rng((params.seed, epoch, w)),
                        chunk_total,
                        processed_per[w],
                    )
                    for w in range(workers)
                ]
                processed_per = [f.result() for f in futures]

    if not np.isfinite(model.token_vectors).all() or not np.isfinite(
        model.ngram_vectors
    ).all():
        raise ConfigurationError("subword training produced non-finite vectors")
    return model


def rank_similar_forms(
    model: SubwordModel, keyword: str, k: int
) -> list[tuple[str, float]]:
    """Vocabulary tokens ranked by cosine similarity to the keyword.

    The keyword itself is excluded; ties break lexicographically.  A
    keyword absent from the vocabulary is composed from its n-grams.
    Asking for more results than the vocabulary holds returns the full
    ranking.
    """
    query = model.compose(keyword)
    qnorm = math.sqrt(float(query @ query))
    if qnorm == 0.0:
        raise PreconditionError(f"keyword {keyword!r} composes to a zero vector")
    scored: list[tuple[float, str]] = []
    for token in model.tokens:
        if token == keyword:
            continue
        vec = model.compose(token)
        norm = math.sqrt(float(vec @ vec))
        if norm == 0.0:
            continue
        scored.append((float(query @ vec) / (qnorm * norm), token))
    scored.sort(key=lambda sv: (-sv[0], sv[1]))
    return [(token, cos) for cos, token in scored[: max(k, 0)]]


def save_subword_model(model: SubwordModel, path: str | Path) -> None:
    """Persist as an .npz archive with a JSON metadata entry."""
    meta = {
        "tokens": model.tokens,
        "counts": model.counts,
        "ngram_range": list(model.ngram_range),
        "dim": model.dim,
        "bucket_count": model.bucket_count,
    }
    np.savez(
        path,
        meta=np.array([json.dumps(meta)]),
        token_vectors=model.token_vectors,
        ngram_vectors=model.ngram_vectors,
        output_vectors=model.output_vectors,
    )


def load_subword_model(path: str | Path) -> SubwordModel:
    with np.load(path, allow_pickle=False) as archive:
        meta = json.loads(str(archive["meta"][0]))
        tokens = list(meta["tokens"])
        return SubwordModel(
            vocabulary={t: i for i, t in enumerate(tokens)},
            tokens=tokens,
            counts=[int(c) for c in meta["counts"]],
            token_vectors=archive["token_vectors"],
            ngram_vectors=archive["ngram_vectors"],
            output_vectors=archive["output_vectors"],
            ngram_range=(int(meta["ngram_range"][0]), int(meta["ngram_range"][1])),
            dim=int(meta["dim"]),
            bucket_count=int(meta["bucket_count"]),
        )

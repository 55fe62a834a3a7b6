"""Negative-sampling embedding training (CBOW and skip-gram).

Both objectives share one core step: a hidden vector ``h`` is scored
against one positive and several noise rows of the output table.  For
skip-gram ``h`` is the center word's input vector and the positive is a
context word; for CBOW ``h`` is the mean of the context input vectors
and the positive is the center word.

Deterministic for a fixed seed: sequences are visited in order, tokens
in order, and all randomness (window span, subsampling, noise draws)
comes from one seeded generator.  Snippet boundaries are hard; windows
never cross them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from ..errors import PreconditionError, TrainingDivergedError
from .model import EmbeddingModel, Hyperparams
from .vocab import Vocabulary

__all__ = [
    "negative_sampling_loss",
    "negative_sampling_gradients",
    "init_vectors",
    "train_embeddings",
]


def negative_sampling_loss(
    h: np.ndarray,
    output_vectors: np.ndarray,
    positive: int,
    negatives: Sequence[int],
) -> float:
    """-log sigmoid(u_pos . h) - sum(-log sigmoid(-u_neg . h))."""
    s_pos = float(output_vectors[positive] @ h)
    loss = float(np.logaddexp(0.0, -s_pos))
    for neg in negatives:
        s_neg = float(output_vectors[neg] @ h)
        loss += float(np.logaddexp(0.0, s_neg))
    return loss


def negative_sampling_gradients(
    h: np.ndarray,
    output_vectors: np.ndarray,
    positive: int,
    negatives: Sequence[int],
) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Analytic gradients of the loss above.

    Returns (dL/dh, {output row: dL/du_row}); repeated negative rows
    accumulate into one entry.
    """
    def sigmoid(x: float) -> float:
        return 1.0 / (1.0 + np.exp(-x))

    g_out: dict[int, np.ndarray] = {}
    err_pos = sigmoid(float(output_vectors[positive] @ h)) - 1.0
    g_h = err_pos * output_vectors[positive]
    g_out[positive] = err_pos * h.copy()
    for neg in negatives:
        err_neg = sigmoid(float(output_vectors[neg] @ h))
        g_h = g_h + err_neg * output_vectors[neg]
        if neg in g_out:
            g_out[neg] = g_out[neg] + err_neg * h
        else:
            g_out[neg] = err_neg * h.copy()
    return g_h, g_out


def init_vectors(rng: np.random.Generator, vocab_size: int, dim: int) -> np.ndarray:
    """Small uniform init; also used by zero-epoch identity checks."""
    bound = 0.5 / dim
    return rng.uniform(-bound, bound, (vocab_size, dim))


def _keep_probabilities(vocab: Vocabulary, threshold: float) -> np.ndarray | None:
    if threshold <= 0:
        return None
    total = sum(vocab.counts)
    freqs = np.asarray(vocab.counts, dtype=np.float64) / total
    return np.minimum(1.0, np.sqrt(threshold / freqs))


def _train_span(
    sequences: Sequence[Sequence[int]],
    input_vectors: np.ndarray,
    output_vectors: np.ndarray,
    hp: Hyperparams,
    rng: np.random.Generator,
    noise_cdf: np.ndarray,
    keep_probs: np.ndarray | None,
    budget: int,
    processed: int,
) -> tuple[float, int, int]:
    """One pass over ``sequences``; returns (loss sum, samples, processed)."""
    lr_span = hp.lr_end - hp.lr_start
    loss_sum = 0.0
    samples = 0
    for seq in sequences:
        if keep_probs is None:
            kept = list(seq)
        else:
            kept = [w for w in seq if rng.random() < keep_probs[w]]
        for pos, center in enumerate(kept):
            lr = hp.lr_start + lr_span * min(1.0, processed / budget)
            processed += 1
            span = int(rng.integers(1, hp.window + 1))
            lo = max(0, pos - span)
            hi = min(len(kept), pos + span + 1)
            context = [kept[j] for j in range(lo, hi) if j != pos]
            if not context:
                continue
            if hp.mode == "skipgram":
                for target in context:
                    negs = _draw_negatives(rng, noise_cdf, hp.negatives, target)
                    loss_sum += _update(
                        input_vectors,
                        output_vectors,
                        input_vectors[center],
                        center,
                        None,
                        [target] + negs,
                        lr,
                    )
                    samples += 1
            else:
                h = input_vectors[context].mean(axis=0)
                negs = _draw_negatives(rng, noise_cdf, hp.negatives, center)
                loss_sum += _update(
                    input_vectors, output_vectors, h, None, context, [center] + negs, lr
                )
                samples += 1
    return loss_sum, samples, processed


def train_embeddings(
    sequences: Sequence[Sequence[int]],
    vocabulary: Vocabulary,
    hp: Hyperparams,
    workers: int = 1,
) -> EmbeddingModel:
    """Train on encoded snippet sequences (see ``Vocabulary.encode``).

    The learning rate decays linearly from lr_start toward lr_end over
    the planned token budget (epochs x corpus positions).  The window
    span is drawn uniformly from [1, window] per center token.  Noise
    words follow the unigram distribution raised to 0.75; draws equal to
    the positive row are dropped.  Mean per-epoch loss is recorded on
    the model.  Zero epochs returns the untouched initialization.

    ``workers=1`` is the contractual deterministic mode.  ``workers>1``
    updates the shared tables from several threads without locks
    (nondeterministic, opt-in for large corpora).
    """
    if hp.mode not in ("cbow", "skipgram"):
        raise PreconditionError(f"unknown training mode {hp.mode!r}")
    if workers < 1:
        raise PreconditionError("workers must be >= 1")
    v = len(vocabulary)
    for seq in sequences:
        for idx in seq:
            if not 0 <= idx < v:
                raise PreconditionError(f"token index {idx} outside vocabulary")

    rng = np.random.default_rng(hp.seed)
    input_vectors = init_vectors(rng, v, hp.dim)
    output_vectors = init_vectors(rng, v, hp.dim)

    weights = np.asarray(vocabulary.counts, dtype=np.float64) ** 0.75
    noise_cdf = np.cumsum(weights)
    noise_cdf /= noise_cdf[-1]
    keep_probs = _keep_probabilities(vocabulary, hp.subsample_threshold)

    budget = max(1, hp.epochs * sum(len(s) for s in sequences))
    epoch_losses: list[float] = []

    if workers == 1:
        processed = 0
        for epoch in range(hp.epochs):
            loss_sum, samples, processed = _train_span(
                sequences,
                input_vectors,
                output_vectors,
                hp,
                rng,
                noise_cdf,
                keep_probs,
                budget,
                processed,
            )
            _check_finite(input_vectors, output_vectors, epoch, hp, processed, budget)
            epoch_losses.append(loss_sum / samples if samples else 0.0)
    else:
        chunks = [list(sequences[w::workers]) for w in range(workers)]
        chunk_budget = max(1, budget // workers)
        processed_per = [0] * workers
        for epoch in range(hp.epochs):
            results: list[tuple[float, int, int]] = [(0.0, 0, 0)] * workers
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {
                    pool.submit(
                        _train_span,
                        chunks[w],
                        input_vectors,
                        output_vectors,
                        hp,
                        np.random.default_rng((hp.seed, epoch, w)),
                        noise_cdf,
                        keep_probs,
                        chunk_budget,
                        processed_per[w],
                    ): w
                    for w in range(workers)
                }
                for future, w in futures.items():
                    results[w] = future.result()
            processed_per = [r[2] for r in results]
            _check_finite(
                input_vectors, output_vectors, epoch, hp, max(processed_per), chunk_budget
            )
            total_loss = sum(r[0] for r in results)
            total_samples = sum(r[1] for r in results)
            epoch_losses.append(total_loss / total_samples if total_samples else 0.0)

    return EmbeddingModel(
        vocabulary=vocabulary,
        input_vectors=input_vectors,
        output_vectors=output_vectors,
        hyperparams=hp,
        epoch_losses=epoch_losses,
    )


def _check_finite(
    input_vectors: np.ndarray,
    output_vectors: np.ndarray,
    epoch: int,
    hp: Hyperparams,
    processed: int,
    budget: int,
) -> None:
    if not np.isfinite(input_vectors).all() or not np.isfinite(output_vectors).all():
        lr = hp.lr_start + (hp.lr_end - hp.lr_start) * min(1.0, processed / budget)
        raise TrainingDivergedError(epoch, lr)


def _draw_negatives(
    rng: np.random.Generator, noise_cdf: np.ndarray, count: int, positive: int
) -> list[int]:
    draws = np.searchsorted(noise_cdf, rng.random(count))
    return [int(d) for d in draws if int(d) != positive]


def _update(
    input_vectors: np.ndarray,
    output_vectors: np.ndarray,
    h: np.ndarray,
    center: int | None,
    context: Sequence[int] | None,
    rows: list[int],
    lr: float,
) -> float:
    """One negative-sampling step; returns the pre-update sample loss."""
    outs = output_vectors[rows]
    scores = outs @ h
    labels = np.zeros(len(rows))
    labels[0] = 1.0
    loss = float(np.logaddexp(0.0, -scores[0]))
    if len(rows) > 1:
        loss += float(np.logaddexp(0.0, scores[1:]).sum())
    err = 1.0 / (1.0 + np.exp(-scores)) - labels
    g_h = err @ outs
    # Output rows may repeat (duplicate negative draws): accumulate.
    np.subtract.at(output_vectors, rows, lr * err[:, None] * h[None, :])
    if center is not None:
        input_vectors[center] -= lr * g_h
    else:
        assert context is not None
        np.subtract.at(input_vectors, context, (lr / len(context)) * g_h)
    return loss

"""Trained embedding model: vector tables, queries, and on-disk format.

The model file is a self-describing text container: a JSON header line
(hyperparameters, vocabulary, per-epoch losses) followed by the input
and output vector tables, one vector per line as hex floats, which
round-trip bit-exactly.  ``export_text`` writes the interchange format
(one ``token v1 v2 ...`` line per word).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from ..errors import NotFoundError, PreconditionError
from ..variants.metrics import levenshtein_distance
from .vocab import Vocabulary

__all__ = [
    "Hyperparams",
    "EmbeddingModel",
    "cosine_similarity",
    "nearest_neighbors",
    "contrastive_neighbors",
    "save_model",
    "load_model",
    "export_text",
]

_FORMAT = "discoursekit-embedding/1"


@dataclass(frozen=True)
class Hyperparams:
    mode: Literal["cbow", "skipgram"] = "skipgram"
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr_start: float = 0.025
    lr_end: float = 0.0001
    seed: int = 1
    subsample_threshold: float = 1e-3


@dataclass
class EmbeddingModel:
    vocabulary: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    hyperparams: Hyperparams
    epoch_losses: list[float] = field(default_factory=list)

    def vector(self, word: str) -> np.ndarray:
        idx = self.vocabulary.index.get(word)
        if idx is None:
            raise _not_found(word, self.vocabulary)
        return self.input_vectors[idx]


def _not_found(word: str, vocab: Vocabulary) -> NotFoundError:
    nearest = sorted(vocab.tokens, key=lambda t: (levenshtein_distance(word, t), t))[:3]
    return NotFoundError(
        f"{word!r} is not in the vocabulary; nearest spellings: {', '.join(nearest)}"
    )


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        raise PreconditionError("cosine_similarity requires non-zero vectors")
    return float(u @ v) / (nu * nv)


def nearest_neighbors(
    model: EmbeddingModel, word: str, k: int
) -> list[tuple[str, float]]:
    """Vocabulary ranked by cosine to ``word`` over the input vectors.

    The query word is excluded; descending cosine with lexicographic
    tie-break; ``k`` beyond the vocabulary returns the full ranking.
    """
    query = model.vector(word)
    scored = [
        (cosine_similarity(query, model.input_vectors[idx]), token)
        for token, idx in model.vocabulary.index.items()
        if token != word
    ]
    scored.sort(key=lambda sv: (-sv[0], sv[1]))
    return [(token, cos) for cos, token in scored[: max(k, 0)]]


def contrastive_neighbors(
    model: EmbeddingModel,
    target: str,
    contrast: str,
    k: int,
    mode: Literal["score_diff", "vector_diff"] = "score_diff",
) -> list[tuple[str, float]]:
    """Rank words by affinity to ``target`` net of ``contrast``.

    ``score_diff`` scores cos(w, target) - cos(w, contrast); keeps each
    word's cosine semantics.  ``vector_diff`` ranks by cosine to the
    difference vector instead.  Both exclude the two anchor words.
    """
    if target == contrast:
        raise PreconditionError("target and contrast must differ")
    v_target = model.vector(target)
    v_contrast = model.vector(contrast)
    diff = v_target - v_contrast
    scored: list[tuple[float, str]] = []
    for token, idx in model.vocabulary.index.items():
        if token == target or token == contrast:
            continue
        vec = model.input_vectors[idx]
        if mode == "score_diff":
            score = cosine_similarity(vec, v_target) - cosine_similarity(vec, v_contrast)
        elif mode == "vector_diff":
            score = cosine_similarity(vec, diff)
        else:
            raise PreconditionError(f"unknown contrast mode {mode!r}")
        scored.append((score, token))
    scored.sort(key=lambda sv: (-sv[0], sv[1]))
    return [(token, score) for score, token in scored[: max(k, 0)]]


def _vector_line(vec: np.ndarray) -> str:
    return " ".join(float(x).hex() for x in vec)


def _parse_vector(line: str) -> list[float]:
    return [float.fromhex(part) for part in line.split()]


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    header = {
        "format": _FORMAT,
        "hyperparams": asdict(model.hyperparams),
        "vocab": [
            [t, c] for t, c in zip(model.vocabulary.tokens, model.vocabulary.counts)
        ],
        "total_tokens": model.vocabulary.total_tokens,
        "epoch_losses": [float(x).hex() for x in model.epoch_losses],
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
        for row in model.input_vectors:
            fh.write(_vector_line(row) + "\n")
        for row in model.output_vectors:
            fh.write(_vector_line(row) + "\n")


def load_model(path: str | Path) -> EmbeddingModel:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != _FORMAT:
            raise PreconditionError(f"{path}: not a {_FORMAT} file")
        tokens = tuple(t for t, _ in header["vocab"])
        counts = tuple(int(c) for _, c in header["vocab"])
        vocab = Vocabulary(
            index={t: i for i, t in enumerate(tokens)},
            tokens=tokens,
            counts=counts,
            total_tokens=int(header["total_tokens"]),
        )
        rows = [_parse_vector(fh.readline()) for _ in range(2 * len(tokens))]
    n = len(tokens)
    return EmbeddingModel(
        vocabulary=vocab,
        input_vectors=np.array(rows[:n], dtype=np.float64),
        output_vectors=np.array(rows[n:], dtype=np.float64),
        hyperparams=Hyperparams(**header["hyperparams"]),
        epoch_losses=[float.fromhex(x) for x in header["epoch_losses"]],
    )


def export_text(model: EmbeddingModel, path: str | Path, precision: int = 8) -> None:
    """Plain-text interchange export: one ``token v1 v2 ...`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for token, idx in sorted(model.vocabulary.index.items(), key=lambda kv: kv[1]):
            values = " ".join(f"{x:.{precision}g}" for x in model.input_vectors[idx])
            fh.write(f"{token} {values}\n")

"""Frequency-filtered vocabulary over preprocessed snippet tokens."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import ConfigurationError

__all__ = ["Vocabulary", "build_vocab"]


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]
    tokens: tuple[str, ...]
    counts: tuple[int, ...]
    total_tokens: int

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def encode(self, tokens: Sequence[str]) -> list[int]:
        """Map tokens to indices, dropping filtered tokens (positions close up)."""
        return [self.index[t] for t in tokens if t in self.index]


def build_vocab(token_stream: Iterable[Sequence[str]], min_count: int = 10) -> Vocabulary:
    """Count tokens and keep those seen strictly more than ``min_count`` times.

    Indices are dense, assigned by descending count then token, so a
    given corpus always produces the same vocabulary.
    """
    freq: dict[str, int] = {}
    total = 0
    for tokens in token_stream:
        for token in tokens:
            freq[token] = freq.get(token, 0) + 1
            total += 1
    kept = sorted(
        (t for t, c in freq.items() if c > min_count), key=lambda t: (-freq[t], t)
    )
    if not kept:
        raise ConfigurationError(
            f"empty vocabulary: no token appeared more than {min_count} times"
        )
    return Vocabulary(
        index={t: i for i, t in enumerate(kept)},
        tokens=tuple(kept),
        counts=tuple(freq[t] for t in kept),
        total_tokens=total,
    )

"""Snippet preprocessing: tokenize, lowercase, stop-filter, lemmatize.

The pipeline order is fixed and deterministic.  The lemmatizer is
pluggable (any ``str -> str`` callable); the bundled default is a small
rule lemmatizer (irregular table, plural stripping, common verb
suffixes) adequate for corpus statistics, not linguistic analysis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

__all__ = [
    "TokenizedSnippet",
    "tokenize",
    "preprocess",
    "load_stopwords",
    "default_stopwords",
    "RuleLemmatizer",
]

Lemmatizer = Callable[[str], str]

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


@dataclass(frozen=True)
class TokenizedSnippet:
    """Preprocessed snippet: content tokens plus provenance for counting."""

    snippet_id: str
    tokens: tuple[str, ...]
    lccn: str = ""


def tokenize(text: str) -> list[str]:
    """Split on whitespace and punctuation; keeps alphanumeric runs."""
    return _TOKEN_RE.findall(text)


def load_stopwords(path: str | Path) -> frozenset[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    ref = resources.files("discoursekit.embedding") / "data" / "stopwords.txt"
    with resources.as_file(ref) as path:
        return load_stopwords(path)


_IRREGULAR = {
    "children": "child",
    "men": "man",
    "women": "woman",
    "feet": "foot",
    "teeth": "tooth",
    "geese": "goose",
    "mice": "mouse",
    "oxen": "ox",
    "wives": "wife",
    "knives": "knife",
    "leaves": "leaf",
    "lives": "life",
    "selves": "self",
    "ran": "run",
    "running": "run",
    "went": "go",
    "gone": "go",
    "made": "make",
    "said": "say",
    "told": "tell",
    "sold": "sell",
    "bought": "buy",
    "brought": "bring",
    "thought": "think",
    "taught": "teach",
    "caught": "catch",
    "held": "hold",
    "kept": "keep",
    "left": "leave",
    "lost": "lose",
    "met": "meet",
    "paid": "pay",
    "sat": "sit",
    "stood": "stand",
    "took": "take",
    "taken": "take",
    "gave": "give",
    "given": "give",
    "got": "get",
    "came": "come",
    "knew": "know",
    "known": "know",
    "saw": "see",
    "seen": "see",
    "did": "do",
    "done": "do",
    "wrote": "write",
    "written": "write",
    "spoke": "speak",
    "spoken": "speak",
    "drove": "drive",
    "driven": "drive",
    "ate": "eat",
    "eaten": "eat",
    "fell": "fall",
    "fallen": "fall",
    "found": "find",
    "grew": "grow",
    "grown": "grow",
    "heard": "hear",
    "laid": "lay",
    "led": "lead",
    "rose": "rise",
    "risen": "rise",
    "sent": "send",
    "shown": "show",
    "sang": "sing",
    "sung": "sing",
    "slept": "sleep",
    "spent": "spend",
    "wore": "wear",
    "worn": "wear",
    "won": "win",
}

_VOWELS = set("aeiou")


class RuleLemmatizer:
    """Suffix-rule English lemmatizer with a small irregular table."""

    def __init__(self, extra_irregulars: dict[str, str] | None = None) -> None:
        self._table = dict(_IRREGULAR)
        if extra_irregulars:
            self._table.update(extra_irregulars)

    def __call__(self, token: str) -> str:
        hit = self._table.get(token)
        if hit is not None:
            return hit
        return self._suffix(token)

    @staticmethod
    def _undouble(stem: str) -> str:
        if (
            len(stem) >= 3
            and stem[-1] == stem[-2]
            and stem[-1] not in "lsz"
            and stem[-1] not in _VOWELS
        ):
            return stem[:-1]
        return stem

    def _suffix(self, token: str) -> str:
        if len(token) > 4 and token.endswith("ies"):
            return token[:-3] + "y"
        if len(token) > 4 and token.endswith(("shes", "ches", "xes", "zes", "sses")):
            return token[:-2]
        if len(token) > 3 and token.endswith("s") and not token.endswith("ss"):
            return token[:-1]
        if len(token) > 5 and token.endswith("ing"):
            return self._undouble(token[:-3])
        if len(token) > 4 and token.endswith("ed"):
            return self._undouble(token[:-2])
        return token


def preprocess(
    text: str,
    stopwords: frozenset[str],
    lemmatizer: Lemmatizer,
) -> list[str]:
    """Tokenize, lowercase, drop stopwords, lemmatize; in that order."""
    out = []
    for raw in tokenize(text):
        low = raw.lower()
        if low in stopwords:
            continue
        out.append(lemmatizer(low))
    return out


def preprocess_snippet(
    snippet_id: str,
    text: str,
    stopwords: frozenset[str],
    lemmatizer: Lemmatizer,
    lccn: str = "",
) -> TokenizedSnippet:
    return TokenizedSnippet(
        snippet_id=snippet_id,
        tokens=tuple(preprocess(text, stopwords, lemmatizer)),
        lccn=lccn,
    )


def preprocess_many(
    items: Sequence[tuple[str, str, str]],
    stopwords: frozenset[str] | None = None,
    lemmatizer: Lemmatizer | None = None,
) -> list[TokenizedSnippet]:
    """Preprocess (snippet_id, text, lccn) triples with the defaults."""
    stops = stopwords if stopwords is not None else default_stopwords()
    lemma = lemmatizer if lemmatizer is not None else RuleLemmatizer()
    return [
        preprocess_snippet(sid, text, stops, lemma, lccn) for sid, text, lccn in items
    ]

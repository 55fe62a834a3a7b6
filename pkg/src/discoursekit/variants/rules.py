"""Rule-based screening of keyword-variant candidates.

Candidates surfaced by subword similarity are mostly one of: a real
dictionary word that happens to look alike, a truncated fragment of the
keyword, or the keyword fused with a neighboring token by bad OCR
tokenization.  The rule filter encodes those cases:

  1. a dictionary word that is not semantically relevant -> exclude
  2. a proper prefix of the keyword (>= 3 chars)         -> exclude
  3. keyword + a function-word tail ("slaveto")          -> include
  4. keyword + a gender-word tail ("servantwoman")       -> include
  5. anything else -> needs human review (strict mode: exclude)

Rules are checked in that order; an earlier rule wins even when a later
one would also match.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class RuleDecision(str, enum.Enum):
    INCLUDE = "include"
    EXCLUDE = "exclude"
    NEEDS_REVIEW = "needs_review"


class RuleFired(str, enum.Enum):
    DICTIONARY_IRRELEVANT = "dictionary_irrelevant"
    PARTIAL_FORM = "partial_form"
    FUNCTION_TAIL = "function_tail"
    GENDER_TAIL = "gender_tail"
    NO_RULE = "no_rule"


MIN_PARTIAL_LEN = 3


@dataclass(frozen=True)
class RuleLexicons:
    """Word sets driving the rule filter; all entries lowercase."""

    dictionary: frozenset[str]
    semantically_relevant: frozenset[str]
    function_words: frozenset[str]
    gender_words: frozenset[str]

    @staticmethod
    def load(directory: str | Path) -> "RuleLexicons":
        """Load the four lexicon files (one lowercase word per line)."""
        directory = Path(directory)
        return RuleLexicons(
            dictionary=_read_wordlist(directory / "dictionary.txt"),
            semantically_relevant=_read_wordlist(directory / "semantically_relevant.txt"),
            function_words=_read_wordlist(directory / "function_words.txt"),
            gender_words=_read_wordlist(directory / "gender_words.txt"),
        )

    @staticmethod
    def bundled() -> "RuleLexicons":
        """The editable default lexicons shipped with the package."""
        root = resources.files("discoursekit.variants") / "data"
        with resources.as_file(root) as path:
            return RuleLexicons.load(path)


def _read_wordlist(path: Path) -> frozenset[str]:
    words: set[str] = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def classify_candidate(
    surface: str, keyword: str, lex: RuleLexicons, *, strict: bool = False
) -> tuple[RuleDecision, RuleFired]:
    """Apply the rule cascade to one lowercase candidate surface form.

    Total over all strings: every input gets a decision.  With
    ``strict=True`` the fall-through case is excluded instead of routed
    to review (fully automated mode).
    """
    if surface in lex.dictionary and surface not in lex.semantically_relevant:
        return RuleDecision.EXCLUDE, RuleFired.DICTIONARY_IRRELEVANT
    if (
        len(surface) >= MIN_PARTIAL_LEN
        and len(surface) < len(keyword)
        and keyword.startswith(surface)
    ):
        return RuleDecision.EXCLUDE, RuleFired.PARTIAL_FORM
    if surface.startswith(keyword) and len(surface) > len(keyword):
        tail = surface[len(keyword):]
        if tail in lex.function_words:
            return RuleDecision.INCLUDE, RuleFired.FUNCTION_TAIL
        if tail in lex.gender_words:
            return RuleDecision.INCLUDE, RuleFired.GENDER_TAIL
    if strict:
        return RuleDecision.EXCLUDE, RuleFired.NO_RULE
    return RuleDecision.NEEDS_REVIEW, RuleFired.NO_RULE

"""Keyword-anchored line-window snippets with provenance.

Matching is token-based: lines split on whitespace, punctuation stripped
from token edges, compared case-insensitively against the accepted
surface forms.  Substrings do not match ("enslavement" is not a hit for
"slave").  A snippet's text is the anchor line plus ``window`` lines on
each side, truncated silently at page edges and joined with single
spaces.
"""

from __future__ import annotations

import hashlib
import json
import string
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from .corpus.store import PageDocument
from .errors import PreconditionError

__all__ = [
    "Snippet",
    "SnippetSet",
    "snippet_id",
    "scan_keyword_lines",
    "extract_snippet",
    "build_snippet_set",
    "write_snippets_jsonl",
    "read_snippets_jsonl",
]

_STRIP_CHARS = string.punctuation + "‘’“”"

_FIELD_ORDER = (
    "snippet_id",
    "keyword",
    "matched_form",
    "lccn",
    "issue_date",
    "edition",
    "sequence",
    "anchor_line",
    "window",
    "text",
)


@dataclass(frozen=True)
class Snippet:
    snippet_id: str
    keyword: str
    matched_form: str
    lccn: str
    issue_date: date
    edition: int
    sequence: int
    anchor_line: int
    window: int
    text: str


@dataclass
class SnippetSet:
    keyword: str
    snippets: list[Snippet] = field(default_factory=list)

    @property
    def per_newspaper_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for snip in self.snippets:
            counts[snip.lccn] = counts.get(snip.lccn, 0) + 1
        return counts


def snippet_id(
    lccn: str,
    issue_date: date,
    edition: int,
    sequence: int,
    anchor_line: int,
    keyword: str,
) -> str:
    """Stable identifier, a pure function of the anchor coordinates."""
    key = f"{lccn}|{issue_date.isoformat()}|{edition}|{sequence}|{anchor_line}|{keyword}"
    return hashlib.blake2b(key.encode("utf-8"), digest_size=8).hexdigest()


def _match_token(raw: str, forms: frozenset[str]) -> str | None:
    token = raw.strip(_STRIP_CHARS).lower()
    return token if token in forms else None


def scan_keyword_lines(
    page: PageDocument, forms: Iterable[str]
) -> list[tuple[int, str]]:
    """Distinct (line index, matched form) hits, sorted by line then form."""
    wanted = frozenset(f.lower() for f in forms)
    if not wanted:
        raise PreconditionError("scan_keyword_lines: empty form set")
    hits: set[tuple[int, str]] = set()
    for idx, line in enumerate(page.lines):
        for raw in line.split():
            token = _match_token(raw, wanted)
            if token is not None:
                hits.add((idx, token))
    return sorted(hits)


def extract_snippet(
    page: PageDocument,
    anchor: int,
    window: int,
    *,
    keyword: str,
    matched_form: str,
) -> Snippet:
    if not 0 <= anchor < len(page.lines):
        raise PreconditionError(
            f"anchor {anchor} outside page with {len(page.lines)} lines"
        )
    if window < 0:
        raise PreconditionError("window must be non-negative")
    lo = max(0, anchor - window)
    hi = min(len(page.lines) - 1, anchor + window)
    text = " ".join(page.lines[lo : hi + 1])
    return Snippet(
        snippet_id=snippet_id(
            page.lccn, page.issue_date, page.edition, page.sequence, anchor, keyword
        ),
        keyword=keyword,
        matched_form=matched_form,
        lccn=page.lccn,
        issue_date=page.issue_date,
        edition=page.edition,
        sequence=page.sequence,
        anchor_line=anchor,
        window=window,
        text=text,
    )


def build_snippet_set(
    pages: Iterable[PageDocument],
    keyword: str,
    forms: Iterable[str],
    window: int,
) -> SnippetSet:
    """Scan pages in the order given (the store streams in key order)."""
    forms = {f.lower() for f in forms}
    if keyword.lower() not in forms:
        raise PreconditionError("forms must include the canonical keyword")
    out = SnippetSet(keyword=keyword)
    for page in pages:
        for anchor, matched in scan_keyword_lines(page, forms):
            out.snippets.append(
                extract_snippet(
                    page, anchor, window, keyword=keyword, matched_form=matched
                )
            )
    return out


def snippet_to_json(snip: Snippet) -> str:
    record = {
        "snippet_id": snip.snippet_id,
        "keyword": snip.keyword,
        "matched_form": snip.matched_form,
        "lccn": snip.lccn,
        "issue_date": snip.issue_date.isoformat(),
        "edition": snip.edition,
        "sequence": snip.sequence,
        "anchor_line": snip.anchor_line,
        "window": snip.window,
        "text": snip.text,
    }
    return json.dumps({k: record[k] for k in _FIELD_ORDER}, ensure_ascii=False)


def snippet_from_json(line: str) -> Snippet:
    raw = json.loads(line)
    return Snippet(
        snippet_id=raw["snippet_id"],
        keyword=raw["keyword"],
        matched_form=raw["matched_form"],
        lccn=raw["lccn"],
        issue_date=date.fromisoformat(raw["issue_date"]),
        edition=int(raw["edition"]),
        sequence=int(raw["sequence"]),
        anchor_line=int(raw["anchor_line"]),
        window=int(raw["window"]),
        text=raw["text"],
    )


def write_snippets_jsonl(snippets: Sequence[Snippet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for snip in snippets:
            fh.write(snippet_to_json(snip) + "\n")


def read_snippets_jsonl(path: str | Path) -> list[Snippet]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(snippet_from_json(line))
    return out

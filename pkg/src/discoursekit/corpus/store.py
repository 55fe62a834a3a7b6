"""On-disk page store: one text file per page plus a JSON manifest.

Layout: ``{lccn}/{yyyy-mm-dd}/ed{e}_seq{s}.txt`` under the store root.
The manifest records every page's key fields, source URL, and line
count; loading streams documents in (lccn, date, edition, sequence)
order.  Re-persisting a key overwrites it, so the store never holds
duplicates.  A page file that is missing or unreadable is reported
per key and the stream continues.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Callable, Iterable, Iterator

from ..errors import StoreError

__all__ = ["PageDocument", "CorpusStore", "persist_corpus", "load_corpus", "page_key"]

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class PageDocument:
    lccn: str
    issue_date: date
    edition: int
    sequence: int
    lines: tuple[str, ...]
    source_url: str = ""

    @property
    def key(self) -> str:
        return page_key(self.lccn, self.issue_date, self.edition, self.sequence)

    @property
    def sort_key(self) -> tuple[str, date, int, int]:
        return (self.lccn, self.issue_date, self.edition, self.sequence)


def page_key(lccn: str, issue_date: date, edition: int, sequence: int) -> str:
    return f"{lccn}/{issue_date.isoformat()}/ed{edition}_seq{sequence}"


class CorpusStore:
    """Persistent page store under one root directory."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self._lock = threading.Lock()
        self._manifest: dict[str, dict] = {}
        manifest_path = self.root / MANIFEST_NAME
        if manifest_path.exists():
            self._manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    def __len__(self) -> int:
        return len(self._manifest)

    def keys(self) -> list[str]:
        return [entry_key for entry_key, _ in self._sorted_entries()]

    def _sorted_entries(self) -> list[tuple[str, dict]]:
        return sorted(
            self._manifest.items(),
            key=lambda kv: (
                kv[1]["lccn"],
                kv[1]["issue_date"],
                kv[1]["edition"],
                kv[1]["sequence"],
            ),
        )

    def persist(self, documents: Iterable[PageDocument]) -> int:
        """Write pages and update the manifest; returns pages written."""
        written = 0
        with self._lock:
            for doc in documents:
                path = self.root / doc.lccn / doc.issue_date.isoformat()
                path.mkdir(parents=True, exist_ok=True)
                page_path = path / f"ed{doc.edition}_seq{doc.sequence}.txt"
                # newline="" so carriage returns inside OCR lines survive
                # the round trip untranslated.
                with open(page_path, "w", encoding="utf-8", newline="") as fh:
                    fh.write("\n".join(doc.lines))
                self._manifest[doc.key] = {
                    "lccn": doc.lccn,
                    "issue_date": doc.issue_date.isoformat(),
                    "edition": doc.edition,
                    "sequence": doc.sequence,
                    "source_url": doc.source_url,
                    "line_count": len(doc.lines),
                }
                written += 1
            self._write_manifest()
        return written

    def _write_manifest(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(
            dict(self._sorted_entries()), ensure_ascii=False, sort_keys=False, indent=1
        )
        (self.root / MANIFEST_NAME).write_text(payload + "\n", encoding="utf-8")

    def load_one(self, key: str) -> PageDocument:
        meta = self._manifest.get(key)
        if meta is None:
            raise StoreError(key, "not in manifest")
        page_path = (
            self.root
            / meta["lccn"]
            / meta["issue_date"]
            / f"ed{meta['edition']}_seq{meta['sequence']}.txt"
        )
        try:
            with open(page_path, encoding="utf-8", newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise StoreError(key, f"unreadable page file: {exc}") from exc
        # "".split("\n") is [""], so an empty page (zero lines) is
        # disambiguated from one empty line by the recorded count.
        lines = [] if meta["line_count"] == 0 else text.split("\n")
        if len(lines) != meta["line_count"]:
            raise StoreError(
                key,
                f"line count mismatch: manifest says {meta['line_count']}, file has {len(lines)}",
            )
        return PageDocument(
            lccn=meta["lccn"],
            issue_date=date.fromisoformat(meta["issue_date"]),
            edition=meta["edition"],
            sequence=meta["sequence"],
            lines=tuple(lines),
            source_url=meta["source_url"],
        )

    def load(
        self, on_error: Callable[[StoreError], None] | None = None
    ) -> Iterator[PageDocument]:
        """Stream documents in key order; bad files are reported, not fatal."""
        for key, _ in self._sorted_entries():
            try:
                yield self.load_one(key)
            except StoreError as exc:
                if on_error is not None:
                    on_error(exc)
                else:
                    log.warning("skipping corrupt page: %s", exc)


def persist_corpus(documents: Iterable[PageDocument], root: str | Path) -> CorpusStore:
    store = CorpusStore(root)
    store.persist(documents)
    return store


def load_corpus(
    root: str | Path, on_error: Callable[[StoreError], None] | None = None
) -> Iterator[PageDocument]:
    return CorpusStore(root).load(on_error)

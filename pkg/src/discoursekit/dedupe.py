"""Reprint detection by shared token shingles, keeping the earliest copy.

Snippets are whitespace-tokenized and turned into sets of hashed n-token
shingles (n=5 by default).  Two snippets sharing strictly more than the
threshold number of shingles are reprints; reprint groups are the
connected components of that relation, so chains of near-copies merge.
Candidate pairs come from an inverted shingle index, which is exact:
any pair with at least one shared shingle shares an index bucket.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError
from .snippets import Snippet

__all__ = [
    "ShingleSet",
    "ReprintCluster",
    "DedupReport",
    "shingles",
    "shingle_snippet",
    "match_count",
    "cluster_reprints",
    "dedupe_keep_first",
    "dedupe_snippets",
]


@dataclass(frozen=True)
class ShingleSet:
    snippet_id: str
    shingles: frozenset[int]
    token_count: int
    n: int


@dataclass(frozen=True)
class ReprintCluster:
    members: tuple[str, ...]  # ordered by the snippet sort key

    @property
    def kept(self) -> str:
        return self.members[0]


@dataclass
class DedupReport:
    kept: list[str] = field(default_factory=list)
    removed: dict[str, str] = field(default_factory=dict)  # removed id -> kept id
    removed_per_keyword: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kept_count": len(self.kept),
                "removed_count": len(self.removed),
                "removed_per_keyword": dict(sorted(self.removed_per_keyword.items())),
                "removed": dict(sorted(self.removed.items())),
            },
            ensure_ascii=False,
            sort_keys=True,
            indent=1,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def _hash_shingle(tokens: Sequence[str]) -> int:
    digest = hashlib.blake2b(" ".join(tokens).encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def shingles(tokens: Sequence[str], n: int = 5, snippet_id: str = "") -> ShingleSet:
    """Hashed contiguous n-grams of a token sequence (set semantics)."""
    if n < 1:
        raise PreconditionError("shingle size must be >= 1")
    grams = frozenset(
        _hash_shingle(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
    )
    return ShingleSet(snippet_id=snippet_id, shingles=grams, token_count=len(tokens), n=n)


def shingle_snippet(snippet: Snippet, n: int = 5) -> ShingleSet:
    return shingles(snippet.text.split(), n=n, snippet_id=snippet.snippet_id)


def match_count(a: ShingleSet, b: ShingleSet) -> int:
    if a.n != b.n:
        raise PreconditionError(f"shingle sizes differ: {a.n} vs {b.n}")
    return len(a.shingles & b.shingles)


class _UnionFind:
    def __init__(self, items: Iterable[str]) -> None:
        self.parent = {item: item for item in items}

    def find(self, item: str) -> str:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def cluster_reprints(
    shingle_sets: Sequence[ShingleSet],
    order_key: Mapping[str, tuple],
    threshold: int = 3,
) -> list[ReprintCluster]:
    """Connected components of the "shares > threshold shingles" relation.

    ``order_key`` maps snippet ids to their (date, lccn, sequence,
    anchor) sort key; it fixes member order inside each cluster and the
    order of the clusters themselves, so input order never matters.
    Singletons form their own clusters.
    """
    sizes = {s.n for s in shingle_sets}
    if len(sizes) > 1:
        raise PreconditionError(f"mixed shingle sizes: {sorted(sizes)}")
    if len({s.snippet_id for s in shingle_sets}) != len(shingle_sets):
        raise PreconditionError("duplicate snippet ids in shingle sets")
    index: dict[int, list[int]] = defaultdict(list)
    for pos, sset in enumerate(shingle_sets):
        for gram in sset.shingles:
            index[gram].append(pos)

    overlap: Counter[tuple[int, int]] = Counter()
    for positions in index.values():
        if len(positions) < 2:
            continue
        for i in range(len(positions)):
            for j in range(i + 1, len(positions)):
                pair = (positions[i], positions[j])
                overlap[pair] += 1

    uf = _UnionFind(s.snippet_id for s in shingle_sets)
    for (i, j), count in overlap.items():
        if count > threshold:
            uf.union(shingle_sets[i].snippet_id, shingle_sets[j].snippet_id)

    groups: dict[str, list[str]] = defaultdict(list)
    for sset in shingle_sets:
        groups[uf.find(sset.snippet_id)].append(sset.snippet_id)
    clusters = [
        ReprintCluster(members=tuple(sorted(ids, key=lambda sid: order_key[sid])))
        for ids in groups.values()
    ]
    clusters.sort(key=lambda c: order_key[c.kept])
    return clusters


def dedupe_keep_first(
    clusters: Sequence[ReprintCluster],
    keywords: Mapping[str, str] | None = None,
) -> tuple[set[str], DedupReport]:
    """Keep each cluster's ordering-minimal member; report the removals."""
    report = DedupReport()
    kept_ids: set[str] = set()
    for cluster in clusters:
        kept_ids.add(cluster.kept)
        report.kept.append(cluster.kept)
        for member in cluster.members[1:]:
            report.removed[member] = cluster.kept
            if keywords is not None:
                kw = keywords.get(member, "")
                report.removed_per_keyword[kw] = report.removed_per_keyword.get(kw, 0) + 1
    return kept_ids, report


def _snippet_order_key(snippet: Snippet) -> tuple:
    return (
        snippet.issue_date.isoformat(),
        snippet.lccn,
        snippet.sequence,
        snippet.anchor_line,
        snippet.snippet_id,
    )


def dedupe_snippets(
    snippets: Sequence[Snippet], n: int = 5, threshold: int = 3
) -> tuple[list[Snippet], DedupReport]:
    """Cluster, keep the earliest copy of each reprint group, and report."""
    # The same window can be reached through two accepted forms; those
    # records are textually identical, so only the first participates.
    seen: set[str] = set()
    snippets = [
        s for s in snippets if not (s.snippet_id in seen or seen.add(s.snippet_id))
    ]
    sets = [shingle_snippet(s, n=n) for s in snippets]
    order_key = {s.snippet_id: _snippet_order_key(s) for s in snippets}
    clusters = cluster_reprints(sets, order_key, threshold=threshold)
    kept_ids, report = dedupe_keep_first(
        clusters, keywords={s.snippet_id: s.keyword for s in snippets}
    )
    kept = [s for s in snippets if s.snippet_id in kept_ids]
    kept.sort(key=_snippet_order_key)
    return kept, report

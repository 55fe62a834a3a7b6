"""Over-representation statistics between two corpus partitions.

For a word w with count y in partitions i and j (totals n_i, n_j) and a
prior of a_w pseudo-counts (a_0 their sum), the log-odds difference is

    delta = log((y_i + a_w) / (n_i + a_0 - y_i - a_w))
          - log((y_j + a_w) / (n_j + a_0 - y_j - a_w))

with variance approximated by 1/(y_i + a_w) + 1/(y_j + a_w) and
z = delta / sqrt(variance).  Prior counts come from the combined corpus
(optionally rescaled), so words absent from one partition still get a
finite, shrunken estimate.  Convention throughout: i = north, j = south,
so positive z means over-represented in the north.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .embedding.preprocess import TokenizedSnippet
from .errors import NumericDomainError, PreconditionError

__all__ = [
    "CountTable",
    "PriorModel",
    "LogOddsEntry",
    "DiscourseWordSet",
    "count_tokens",
    "log_odds_informative_dirichlet",
    "classify_over_representation",
    "build_discourse_sets",
    "prevalence_report",
    "PrevalenceReport",
]

log = logging.getLogger(__name__)


@dataclass
class CountTable:
    label: str
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def add(self, word: str, n: int = 1) -> None:
        self.counts[word] = self.counts.get(word, 0) + n

    def to_json(self) -> str:
        return json.dumps(
            {"label": self.label, "counts": dict(sorted(self.counts.items()))},
            ensure_ascii=False,
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "CountTable":
        raw = json.loads(text)
        return CountTable(label=raw["label"], counts={k: int(v) for k, v in raw["counts"].items()})

    @staticmethod
    def load(path: str | Path) -> "CountTable":
        return CountTable.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


@dataclass
class PriorModel:
    """Per-word pseudo-counts a_w with a_0 = sum(a_w)."""

    weights: dict[str, float]
    scale: float = 1.0

    @property
    def a0(self) -> float:
        return sum(self.weights.values())

    @staticmethod
    def from_table(table: CountTable, scale: float = 1.0) -> "PriorModel":
        if scale <= 0:
            raise PreconditionError("prior scale must be positive")
        return PriorModel(
            weights={w: c * scale for w, c in table.counts.items() if c > 0},
            scale=scale,
        )


@dataclass
class LogOddsEntry:
    word: str
    y_i: int
    y_j: int
    delta: float
    variance: float
    z: float
    total_frequency: int
    origin: str | None = None  # south | north | both, discourse words only
    side: str | None = None  # north | south | neither, set by classification


def count_tokens(
    snippets: Iterable[TokenizedSnippet],
    regions: Mapping[str, str],
) -> dict[str, CountTable]:
    """Per-partition count tables plus their element-wise sum under "all"."""
    tables: dict[str, CountTable] = {label: CountTable(label) for label in set(regions.values())}
    combined = CountTable("all")
    for snip in snippets:
        region = regions.get(snip.lccn)
        if region is None:
            raise PreconditionError(
                f"snippet {snip.snippet_id} has unknown newspaper {snip.lccn!r}"
            )
        table = tables[region]
        for token in snip.tokens:
            table.add(token)
            combined.add(token)
    tables["all"] = combined
    return tables


def log_odds_informative_dirichlet(
    counts_i: CountTable,
    counts_j: CountTable,
    prior: PriorModel,
) -> list[LogOddsEntry]:
    """Score every word of either partition that carries prior mass.

    Words with zero prior weight are skipped with a warning rather than
    smoothed invisibly.  Output is sorted by word for stable files.
    """
    n_i = counts_i.total
    n_j = counts_j.total
    a0 = prior.a0
    entries = []
    for word in sorted(set(counts_i.counts) | set(counts_j.counts)):
        a_w = prior.weights.get(word, 0.0)
        if a_w <= 0.0:
            log.warning("word %r has no prior mass; skipped", word)
            continue
        y_i = counts_i.counts.get(word, 0)
        y_j = counts_j.counts.get(word, 0)
        den_i = n_i + a0 - y_i - a_w
        den_j = n_j + a0 - y_j - a_w
        if den_i <= 0.0 or den_j <= 0.0:
            raise NumericDomainError(
                f"non-positive log-odds denominator for {word!r}; check the prior"
            )
        delta = math.log((y_i + a_w) / den_i) - math.log((y_j + a_w) / den_j)
        variance = 1.0 / (y_i + a_w) + 1.0 / (y_j + a_w)
        entries.append(
            LogOddsEntry(
                word=word,
                y_i=y_i,
                y_j=y_j,
                delta=delta,
                variance=variance,
                z=delta / math.sqrt(variance),
                total_frequency=y_i + y_j,
            )
        )
    return entries


def classify_over_representation(
    entries: Iterable[LogOddsEntry],
    i_label: str = "north",
    j_label: str = "south",
) -> list[LogOddsEntry]:
    """Assign each entry the side its z-score points to (0 -> neither)."""
    out = []
    for entry in entries:
        if entry.z > 0:
            entry.side = i_label
        elif entry.z < 0:
            entry.side = j_label
        else:
            entry.side = "neither"
        out.append(entry)
    return out


@dataclass
class DiscourseWordSet:
    keyword: str
    region: str
    words: set[str]


def build_discourse_sets(
    rankings: Mapping[str, Sequence[tuple[str, float]]],
    k: int,
    regions: Mapping[str, str],
    keyword: str,
) -> dict[str, DiscourseWordSet]:
    """Union of per-newspaper top-k contrastive neighbors, per region."""
    sets: dict[str, DiscourseWordSet] = {}
    for lccn, region in regions.items():
        if lccn not in rankings:
            raise PreconditionError(f"no ranking available for newspaper {lccn!r}")
        bucket = sets.setdefault(region, DiscourseWordSet(keyword, region, set()))
        bucket.words.update(word for word, _ in rankings[lccn][:k])
    return sets


@dataclass
class PrevalenceReport:
    keyword: str
    # origin -> side -> count of discourse words over-represented there
    cross_tab: dict[str, dict[str, int]]
    # origin -> number of discourse words of that origin that were scored
    denominators: dict[str, int]
    scatter: list[LogOddsEntry]
    dropped: list[str]


def prevalence_report(
    discourse_sets: Mapping[str, DiscourseWordSet],
    entries: Sequence[LogOddsEntry],
    keyword: str,
) -> PrevalenceReport:
    """Cross-tabulate discourse-word origin against over-represented side.

    A word in both regions' sets appears once with origin "both".  Words
    without a log-odds entry (absent from both partitions) are dropped
    with a warning.
    """
    by_word = {e.word: e for e in entries}
    origins: dict[str, str] = {}
    for region, dset in discourse_sets.items():
        for word in dset.words:
            if word in origins and origins[word] != region:
                origins[word] = "both"
            else:
                origins[word] = region

    sides = ("north", "south", "neither")
    cross: dict[str, dict[str, int]] = {}
    denominators: dict[str, int] = {}
    scatter: list[LogOddsEntry] = []
    dropped: list[str] = []
    for word in sorted(origins):
        origin = origins[word]
        entry = by_word.get(word)
        if entry is None:
            log.warning("discourse word %r absent from both partitions; dropped", word)
            dropped.append(word)
            continue
        if entry.side is None:
            raise PreconditionError("entries must be classified before reporting")
        entry.origin = origin
        cross.setdefault(origin, {s: 0 for s in sides})[entry.side] += 1
        denominators[origin] = denominators.get(origin, 0) + 1
        scatter.append(entry)
    return PrevalenceReport(
        keyword=keyword,
        cross_tab=cross,
        denominators=denominators,
        scatter=scatter,
        dropped=dropped,
    )


def scatter_csv(report: PrevalenceReport) -> str:
    """Canonical scatter serialization consumed by the report emitter."""
    lines = ["word,total_frequency,z,origin"]
    for entry in report.scatter:
        lines.append(
            f"{entry.word},{entry.total_frequency},{entry.z:.6f},{entry.origin}"
        )
    return "\n".join(lines) + "\n"

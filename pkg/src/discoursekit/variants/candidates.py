"""Variant candidates: scored surface forms awaiting adjudication."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .metrics import levenshtein_distance, similarity_ratio
from .rules import RuleDecision, RuleFired, RuleLexicons, classify_candidate

__all__ = [
    "VariantCandidate",
    "build_candidates",
    "expand_keyword_set",
    "write_candidates_jsonl",
    "read_candidates_jsonl",
]

_FIELD_ORDER = (
    "surface",
    "keyword",
    "cosine_to_keyword",
    "levenshtein",
    "similarity_ratio",
    "rule_decision",
    "rule_fired",
    "human_label",
)


@dataclass(frozen=True)
class VariantCandidate:
    surface: str
    keyword: str
    cosine_to_keyword: float
    levenshtein: int
    similarity_ratio: float
    rule_decision: RuleDecision
    rule_fired: RuleFired
    human_label: str | None = None

    @property
    def included(self) -> bool:
        """Final inclusion: the human label when present, else the rule."""
        if self.human_label is not None:
            return self.human_label == "include"
        return self.rule_decision is RuleDecision.INCLUDE

    def with_label(self, label: str | None) -> "VariantCandidate":
        return replace(self, human_label=label)


def build_candidates(
    ranked: Sequence[tuple[str, float]],
    keyword: str,
    lex: RuleLexicons,
    *,
    strict: bool = False,
) -> list[VariantCandidate]:
    """Attach edit metrics and a rule decision to each ranked surface form."""
    out = []
    for surface, cosine in ranked:
        decision, fired = classify_candidate(surface, keyword, lex, strict=strict)
        out.append(
            VariantCandidate(
                surface=surface,
                keyword=keyword,
                cosine_to_keyword=cosine,
                levenshtein=levenshtein_distance(surface, keyword),
                similarity_ratio=similarity_ratio(surface, keyword),
                rule_decision=decision,
                rule_fired=fired,
            )
        )
    return out


def expand_keyword_set(keyword: str, candidates: Iterable[VariantCandidate]) -> set[str]:
    """The keyword plus every candidate whose final state is include."""
    return {keyword} | {c.surface for c in candidates if c.included}


def _to_record(candidate: VariantCandidate) -> dict:
    return {
        "surface": candidate.surface,
        "keyword": candidate.keyword,
        "cosine_to_keyword": candidate.cosine_to_keyword,
        "levenshtein": candidate.levenshtein,
        "similarity_ratio": candidate.similarity_ratio,
        "rule_decision": candidate.rule_decision.value,
        "rule_fired": candidate.rule_fired.value,
        "human_label": candidate.human_label,
    }


def candidate_to_json(candidate: VariantCandidate) -> str:
    record = _to_record(candidate)
    return json.dumps({k: record[k] for k in _FIELD_ORDER}, ensure_ascii=False)


def candidate_from_json(line: str) -> VariantCandidate:
    raw = json.loads(line)
    return VariantCandidate(
        surface=raw["surface"],
        keyword=raw["keyword"],
        cosine_to_keyword=float(raw["cosine_to_keyword"]),
        levenshtein=int(raw["levenshtein"]),
        similarity_ratio=float(raw["similarity_ratio"]),
        rule_decision=RuleDecision(raw["rule_decision"]),
        rule_fired=RuleFired(raw["rule_fired"]),
        human_label=raw.get("human_label"),
    )


def write_candidates_jsonl(candidates: Iterable[VariantCandidate], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for candidate in candidates:
            fh.write(candidate_to_json(candidate) + "\n")


def read_candidates_jsonl(path: str | Path) -> list[VariantCandidate]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(candidate_from_json(line))
    return out

"""OCR-variant discovery: subword similarity, rule screening, agreement."""

from .candidates import (
    VariantCandidate,
    build_candidates,
    expand_keyword_set,
    read_candidates_jsonl,
    write_candidates_jsonl,
)
from .metrics import candidate_stats, cohen_kappa, levenshtein_distance, similarity_ratio
from .rules import RuleDecision, RuleFired, RuleLexicons, classify_candidate
from .subword import SubwordModel, SubwordParams, char_ngrams, rank_similar_forms, train_subword_model

__all__ = [
    "VariantCandidate",
    "build_candidates",
    "expand_keyword_set",
    "read_candidates_jsonl",
    "write_candidates_jsonl",
    "candidate_stats",
    "cohen_kappa",
    "levenshtein_distance",
    "similarity_ratio",
    "RuleDecision",
    "RuleFired",
    "RuleLexicons",
    "classify_candidate",
    "SubwordModel",
    "SubwordParams",
    "char_ngrams",
    "rank_similar_forms",
    "train_subword_model",
]

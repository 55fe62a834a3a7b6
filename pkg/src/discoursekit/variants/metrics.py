"""Edit-distance and annotator-agreement metrics for variant screening.

Levenshtein distance is the unit-cost edit distance; the similarity ratio
is its length-normalized complement scaled to [0, 100].  Cohen's kappa is
the two-rater chance-corrected agreement over binary include/exclude
labels.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from ..errors import PreconditionError

__all__ = [
    "levenshtein_distance",
    "similarity_ratio",
    "candidate_stats",
    "cohen_kappa",
]


def levenshtein_distance(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings (two-row DP)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    # Keep the shorter string in the inner loop.
    if len(b) < len(a):
        a, b = b, a
    prev = list(range(len(a) + 1))
    cur = [0] * (len(a) + 1)
    for j, cb in enumerate(b, start=1):
        cur[0] = j
        for i, ca in enumerate(a, start=1):
            cost = 0 if ca == cb else 1
            cur[i] = min(prev[i] + 1, cur[i - 1] + 1, prev[i - 1] + cost)
        prev, cur = cur, prev
    return prev[len(a)]


def similarity_ratio(a: str, b: str) -> float:
    """Length-normalized edit similarity in [0, 100].

    Defined as ``(1 - distance / max(len(a), len(b))) * 100``; two empty
    strings are identical and score 100.
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 100.0
    return (1.0 - levenshtein_distance(a, b) / longest) * 100.0


def candidate_stats(ratios: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of similarity ratios.

    Raises PreconditionError on empty input (the statistics are undefined).
    """
    if not ratios:
        raise PreconditionError("candidate_stats: no candidates given")
    n = len(ratios)
    mean = math.fsum(ratios) / n
    var = math.fsum((r - mean) ** 2 for r in ratios) / n
    return mean, math.sqrt(var)


def cohen_kappa(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Cohen's kappa for two raters over binary labels (1=include, 0=exclude).

    kappa = (p_o - p_e) / (1 - p_e) with p_o the observed agreement and
    p_e the product-of-marginals chance agreement.  Computed in integer
    arithmetic with a single final division, so small closed-form cases
    come out exact.  When p_e == 1 both raters used one identical class,
    which forces agreement; kappa is 1.0 by convention.
    """
    if len(labels_a) != len(labels_b):
        raise PreconditionError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    n = len(labels_a)
    if n == 0:
        raise PreconditionError("cohen_kappa: empty label lists")
    agree = 0
    a_pos = 0
    b_pos = 0
    for la, lb in zip(labels_a, labels_b):
        if la not in (0, 1) or lb not in (0, 1):
            raise PreconditionError(f"labels must be binary, got ({la!r}, {lb!r})")
        agree += la == lb
        a_pos += la
        b_pos += lb
    # p_o = agree/n, p_e = chance/n^2; kappa = (p_o-p_e)/(1-p_e) rearranged
    # over a common denominator to stay in integers until the last step.
    chance = a_pos * b_pos + (n - a_pos) * (n - b_pos)
    numer = agree * n - chance
    denom = n * n - chance
    if denom == 0:
        return 1.0
    return numer / denom

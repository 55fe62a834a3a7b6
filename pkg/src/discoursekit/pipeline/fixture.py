"""Synthetic fixture corpus: small, offline, with planted ground truth.

Four newspapers (two per region) with planted keyword lines, OCR-fused
variant forms, reprinted advertisement blocks, and region-skewed context
vocabularies.  Everything derives from one seed, so the full pipeline
can run deterministically in CI with no network access.  The planted
truths are written alongside the corpus for harness tests.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

from ..corpus.store import CorpusStore, PageDocument

__all__ = ["FixturePlan", "build_fixture_corpus"]

KEYWORDS = ("copper", "lantern")

PAPERS = (
    ("sn90000001", "Harbor Gazette", "north", "anti_slavery"),
    ("sn90000002", "Northern Ledger", "north", "anti_slavery"),
    ("sn90000003", "Meadow Courier", "south", "pro_slavery"),
    ("sn90000004", "Southern Register", "south", "pro_slavery"),
)

FILLER = (
    "morning", "market", "street", "bridge", "winter", "summer", "council",
    "village", "weather", "letter", "report", "wagon", "court", "school",
    "doctor", "office", "farmer", "miller", "county", "notice",
)

# Context pools per (keyword, region); the region skew in ordinary lines
# makes these the planted over-represented words for the sign checks.
POOLS = {
    ("copper", "north"): ("harbor", "engine", "anchor", "vessel", "cargo", "dock"),
    ("copper", "south"): ("meadow", "orchard", "timber", "furrow", "barley", "plough"),
    ("lantern", "north"): ("chapel", "hymn", "psalm", "sermon", "parish", "steeple"),
    ("lantern", "south"): ("kitchen", "hearth", "kettle", "loom", "spindle", "garret"),
}

# Planted OCR-fused forms: the first two parse as keyword + tail and are
# auto-included under the strict rules; "coppor" hits no rule.
VARIANT_FORMS = {
    "copper": ("copperto", "copperman", "coppor"),
    "lantern": ("lanternwith",),
}

AD_BLOCKS = {
    "copper": (
        "for sale cheap one copper kettle and tongs",
        "apply at the landing near the old mill",
        "terms cash only delivery within the week",
        "inquire of mr jones at the south wharf",
    ),
    "lantern": (
        "lost one brass lantern on market street",
        "a reward will be paid for its return",
        "leave word at the printing office in town",
    ),
}

STOP_FILLER = ("the", "and", "of", "to", "a", "in")


@dataclass
class FixturePlan:
    store_root: Path
    corpus_config: Path
    pipeline_config: Path
    truths: Path


def _ordinary_line(rng: random.Random, region: str) -> list[str]:
    tokens = []
    for _ in range(rng.randint(7, 9)):
        roll = rng.random()
        if roll < 0.30:
            tokens.append(rng.choice(STOP_FILLER))
        elif roll < 0.72:
            tokens.append(rng.choice(FILLER))
        else:
            keyword = rng.choice(KEYWORDS)
            # 10:1 skew toward the paper's own region pool.
            pool_region = region if rng.random() < 10 / 11 else _other(region)
            tokens.append(rng.choice(POOLS[(keyword, pool_region)]))
    return tokens


def _other(region: str) -> str:
    return "south" if region == "north" else "north"


def _keyword_line(
    rng: random.Random, keyword: str, region: str, surface: str
) -> list[str]:
    pool_region = region if rng.random() < 10 / 11 else _other(region)
    pool = POOLS[(keyword, pool_region)]
    return [
        rng.choice(FILLER),
        surface,
        rng.choice(pool),
        rng.choice(pool),
        rng.choice(STOP_FILLER),
        rng.choice(pool),
        rng.choice(FILLER),
    ]


def _page_lines(
    rng: random.Random, region: str, plant_variants: bool
) -> tuple[list[str], dict[str, int]]:
    lines: list[str] = []
    keyword_lines = {kw: 0 for kw in KEYWORDS}
    for _ in range(30):
        roll = rng.random()
        if roll < 0.26:
            keyword = KEYWORDS[0] if roll < 0.13 else KEYWORDS[1]
            surface = keyword
            if plant_variants and rng.random() < 0.22:
                surface = rng.choice(VARIANT_FORMS[keyword])
            lines.append(" ".join(_keyword_line(rng, keyword, region, surface)))
            keyword_lines[keyword] += 1
        else:
            lines.append(" ".join(_ordinary_line(rng, region)))
    return lines, keyword_lines


def _inject_ad(
    rng: random.Random, lines: list[str], keyword: str, corrupt: bool
) -> list[str]:
    block = list(AD_BLOCKS[keyword])
    if corrupt:
        # Corrupt one token near the end of one line, like a bad scan.
        row = rng.randrange(len(block))
        tokens = block[row].split()
        col = len(tokens) - 2
        tokens[col] = tokens[col][:-1] + "x"
        block[row] = " ".join(tokens)
    at = rng.randrange(2, len(lines) - len(block) - 2)
    return lines[:at] + block + lines[at:]


def build_fixture_corpus(root: str | Path, seed: int = 7) -> FixturePlan:
    """Materialize the fixture store, configs, and planted-truth file."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    store = CorpusStore(root / "corpus")

    documents: list[PageDocument] = []
    ad_pages: dict[str, list[str]] = {kw: [] for kw in KEYWORDS}
    for paper_idx, (lccn, _title, region, _stance) in enumerate(PAPERS):
        start = date(1852, 3, 1) + timedelta(days=3 * paper_idx)
        for issue_idx in range(10):
            issue_date = start + timedelta(days=41 * issue_idx)
            lines, _counts = _page_lines(rng, region, plant_variants=paper_idx in (0, 2))
            # The copper ad runs in two papers on several dates; the
            # lantern ad repeats inside one paper (standing type).
            if paper_idx in (0, 2) and issue_idx in (1, 4, 7):
                corrupt = not (paper_idx == 0 and issue_idx == 1)
                lines = _inject_ad(rng, lines, "copper", corrupt)
                ad_pages["copper"].append(f"{lccn}/{issue_date.isoformat()}")
            if paper_idx == 3 and issue_idx in (2, 5, 8):
                corrupt = issue_idx != 2
                lines = _inject_ad(rng, lines, "lantern", corrupt)
                ad_pages["lantern"].append(f"{lccn}/{issue_date.isoformat()}")
            documents.append(
                PageDocument(
                    lccn=lccn,
                    issue_date=issue_date,
                    edition=1,
                    sequence=1,
                    lines=tuple(lines),
                    source_url=f"fixture://{lccn}/{issue_date.isoformat()}",
                )
            )
    store.persist(documents)

    corpus_config = root / "corpus-config.toml"
    corpus_config.write_text(_corpus_config_toml(), encoding="utf-8")
    pipeline_config = root / "pipeline.toml"
    pipeline_config.write_text(_pipeline_config_toml(seed), encoding="utf-8")

    truths = root / "planted-truths.json"
    truths.write_text(
        json.dumps(
            {
                "keywords": list(KEYWORDS),
                "variant_forms": {k: list(v) for k, v in VARIANT_FORMS.items()},
                "pools": {f"{kw}:{region}": list(words) for (kw, region), words in POOLS.items()},
                "ad_pages": ad_pages,
                "papers": [list(p) for p in PAPERS],
            },
            indent=1,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    return FixturePlan(
        store_root=root / "corpus",
        corpus_config=corpus_config,
        pipeline_config=pipeline_config,
        truths=truths,
    )


def _newspaper_tables() -> str:
    rows = []
    for lccn, title, region, stance in PAPERS:
        rows.append(
            "\n".join(
                [
                    "[[corpus.newspapers]]",
                    f'lccn = "{lccn}"',
                    f'title = "{title}"',
                    f'stance = "{stance}"',
                    f'region = "{region}"',
                    'frequency = "weekly"',
                    "date_start = 1850-01-01",
                    "date_end = 1865-12-31",
                ]
            )
        )
    return "\n\n".join(rows)


def _corpus_config_toml() -> str:
    body = _newspaper_tables().replace("corpus.newspapers", "newspapers")
    return body + "\n"


def _pipeline_config_toml(seed: int) -> str:
    return f"""# Fixture pipeline: runs offline against the bundled synthetic corpus.
[corpus]
store = "corpus"
source = "local"
pages = "all"

{_newspaper_tables()}

[run]
keywords = ["copper", "lantern"]
date_from = 1850-01-01
date_to = 1865-12-31
out = "out"
seed = {seed}

[snippets]
window = 2

[variants]
k = 30
adjudication = "strict_rules"

[variants.subword]
dim = 24
min_n = 3
max_n = 5
epochs = 2
window = 4
negatives = 4
lr = 0.05
min_count = 2
bucket_count = 16384

[dedupe]
n = 5
threshold = 3

[embedding]
mode = "skipgram"
dim = 24
window = 4
negatives = 5
epochs = 4
lr_start = 0.025
lr_end = 0.0001
subsample_threshold = 0.0
min_count = 2

[discourse]
k = 20
prior_scale = 1.0
"""

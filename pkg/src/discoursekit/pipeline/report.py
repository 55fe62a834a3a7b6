"""Report bundle: scatter tables, ranking tables, prevalence cross-tabs.

All outputs are plain CSV/JSON with fixed headers and formatting, so a
deterministic run always produces byte-identical files.

Bundle layout under ``<out>/report/``:

  scatter_<keyword>.csv     word,total_frequency,log_frequency,z,origin
  rankings_<keyword>.csv    one column per newspaper, k rows of "word (score)"
  prevalence_<keyword>.csv  origin,side,count,denominator,fraction
  dedup_report.json         removed-per-keyword summary across keywords
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import TYPE_CHECKING

from ..stats import LogOddsEntry, build_discourse_sets, prevalence_report, scatter_csv

if TYPE_CHECKING:  # pragma: no cover
    from .runner import _Run

__all__ = ["emit_report", "read_entries_csv"]


def read_entries_csv(path: Path) -> list[LogOddsEntry]:
    entries = []
    lines = path.read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        word, y_i, y_j, delta, variance, z, total, side = line.split(",")
        entries.append(
            LogOddsEntry(
                word=word,
                y_i=int(y_i),
                y_j=int(y_j),
                delta=float(delta),
                variance=float(variance),
                z=float(z),
                total_frequency=int(total),
                side=side,
            )
        )
    return entries


def _read_ranking_csv(path: Path) -> list[tuple[str, float]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    out = []
    for line in lines[1:]:
        word, score = line.rsplit(",", 1)
        out.append((word, float(score)))
    return out


def emit_report(run: "_Run") -> None:
    cfg = run.cfg
    papers = sorted(cfg.newspapers)
    regions = cfg.corpus.regions()
    entries = read_entries_csv(run.path("logodds", "entries.csv"))

    removed_totals: dict[str, int] = {}
    for keyword in cfg.keywords:
        rankings = {
            lccn: _read_ranking_csv(run.path("rankings", f"{keyword}-{lccn}.csv"))
            for lccn in papers
        }

        # Ranking table, one column per configured newspaper.
        rows: list[str] = [",".join(papers)]
        for i in range(cfg.discourse_k):
            cells = []
            for lccn in papers:
                ranked = rankings[lccn]
                if i < len(ranked):
                    word, score = ranked[i]
                    cells.append(f"{word} ({score:.4f})")
                else:
                    cells.append("")
            rows.append(",".join(cells))
        run.path("report", f"rankings_{keyword}.csv").write_text(
            "\n".join(rows) + "\n", encoding="utf-8"
        )

        sets = build_discourse_sets(rankings, cfg.discourse_k, regions, keyword)
        report = prevalence_report(sets, entries, keyword)

        # Canonical 4-column scatter, plus an extended variant carrying
        # both the raw and the log frequency axis.
        run.path("report", f"scatter_{keyword}.csv").write_text(
            scatter_csv(report), encoding="utf-8"
        )
        extended = ["word,total_frequency,log_frequency,z,origin"]
        for entry in report.scatter:
            extended.append(
                f"{entry.word},{entry.total_frequency},"
                f"{math.log10(entry.total_frequency):.6f},{entry.z:.6f},{entry.origin}"
            )
        run.path("report", f"scatter_{keyword}_extended.csv").write_text(
            "\n".join(extended) + "\n", encoding="utf-8"
        )

        prevalence = ["origin,side,count,denominator,fraction"]
        for origin in sorted(report.cross_tab):
            denom = report.denominators.get(origin, 0)
            for side in ("north", "south", "neither"):
                count = report.cross_tab[origin][side]
                fraction = count / denom if denom else 0.0
                prevalence.append(f"{origin},{side},{count},{denom},{fraction:.6f}")
        run.path("report", f"prevalence_{keyword}.csv").write_text(
            "\n".join(prevalence) + "\n", encoding="utf-8"
        )

        dedup_raw = json.loads(
            run.path("dedupe", f"{keyword}-report.json").read_text(encoding="utf-8")
        )
        removed_totals[keyword] = dedup_raw["removed_count"]

    run.path("report", "dedup_report.json").write_text(
        json.dumps({"removed_per_keyword": removed_totals}, indent=1, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )

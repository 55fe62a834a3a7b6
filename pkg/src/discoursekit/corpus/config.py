"""Newspaper metadata and the corpus configuration file.

Stance and region are editorial judgments, so they live in local
configuration and are never scraped; the remote title record only
contributes the title and publication frequency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from ..errors import ConfigurationError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = ["Stance", "Region", "NewspaperSpec", "CorpusConfig", "load_corpus_config"]


class Stance(str, enum.Enum):
    PRO_SLAVERY = "pro_slavery"
    ANTI_SLAVERY = "anti_slavery"


class Region(str, enum.Enum):
    SOUTH = "south"
    NORTH = "north"


@dataclass(frozen=True)
class NewspaperSpec:
    lccn: str
    title: str
    stance: Stance
    region: Region
    frequency: str
    date_start: date
    date_end: date

    def __post_init__(self) -> None:
        if not self.lccn:
            raise ConfigurationError("newspaper lccn must be non-empty")
        if self.date_start > self.date_end:
            raise ConfigurationError(
                f"{self.lccn}: date_start {self.date_start} after date_end {self.date_end}"
            )


_NEWSPAPER_KEYS = {"lccn", "title", "stance", "region", "frequency", "date_start", "date_end"}


@dataclass
class CorpusConfig:
    newspapers: dict[str, NewspaperSpec]
    pages: str = "all"  # "all" or "first": which sequences to scan per issue

    def spec(self, lccn: str) -> NewspaperSpec:
        spec = self.newspapers.get(lccn)
        if spec is None:
            raise ConfigurationError(f"lccn {lccn!r} is not in the corpus configuration")
        return spec

    def regions(self) -> dict[str, str]:
        return {lccn: spec.region.value for lccn, spec in self.newspapers.items()}


def _coerce_date(value: object, where: str) -> date:
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        return date.fromisoformat(value)
    raise ConfigurationError(f"{where}: expected a date, got {value!r}")


def parse_newspaper(raw: dict, where: str = "newspaper") -> NewspaperSpec:
    unknown = set(raw) - _NEWSPAPER_KEYS
    if unknown:
        raise ConfigurationError(f"{where}: unknown keys {sorted(unknown)}")
    for required in ("lccn", "stance", "region", "date_start", "date_end"):
        if required not in raw:
            raise ConfigurationError(f"{where}: missing key {required!r}")
    try:
        stance = Stance(raw["stance"])
        region = Region(raw["region"])
    except ValueError as exc:
        raise ConfigurationError(f"{where}: {exc}") from exc
    return NewspaperSpec(
        lccn=raw["lccn"],
        title=raw.get("title", ""),
        stance=stance,
        region=region,
        frequency=raw.get("frequency", ""),
        date_start=_coerce_date(raw["date_start"], where),
        date_end=_coerce_date(raw["date_end"], where),
    )


def load_corpus_config(path: str | Path) -> CorpusConfig:
    """Parse a TOML corpus config with [[newspapers]] entries."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - {"newspapers", "pages"}
    if unknown:
        raise ConfigurationError(f"{path}: unknown keys {sorted(unknown)}")
    entries = raw.get("newspapers", [])
    if not entries:
        raise ConfigurationError(f"{path}: no [[newspapers]] entries")
    newspapers: dict[str, NewspaperSpec] = {}
    for i, entry in enumerate(entries):
        spec = parse_newspaper(entry, where=f"newspapers[{i}]")
        if spec.lccn in newspapers:
            raise ConfigurationError(f"{path}: duplicate lccn {spec.lccn!r}")
        newspapers[spec.lccn] = spec
    pages = raw.get("pages", "all")
    if pages not in ("all", "first"):
        raise ConfigurationError(f"{path}: pages must be 'all' or 'first', got {pages!r}")
    return CorpusConfig(newspapers=newspapers, pages=pages)

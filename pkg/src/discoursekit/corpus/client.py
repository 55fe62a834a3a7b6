"""HTTP client for the Chronicling America endpoints.

All collection mechanics (rate limiting, retries, parallel fetch) live
here so downstream modules only ever read the local store.  The clock
and sleep functions are injectable for testing; the transport can be
replaced with an httpx mock transport.
"""

from __future__ import annotations

import logging
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date
from typing import Callable, Iterable

import httpx

from ..errors import ConfigurationError, NotFoundError, TransportError
from .config import CorpusConfig, NewspaperSpec
from .store import CorpusStore, PageDocument

__all__ = ["RateLimiter", "IssueRef", "ChroniclingAmericaClient", "ingest_corpus"]

log = logging.getLogger(__name__)

BASE_URL = "https://chroniclingamerica.loc.gov"
_LCCN_RE = re.compile(r"^[a-z]{0,4}[0-9]{8,10}$")
_EDITION_RE = re.compile(r"/ed-(\d+)\.json$")


class RateLimiter:
    """Thread-safe minimum-interval limiter (max requests per second)."""

    def __init__(
        self,
        max_per_second: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if max_per_second <= 0:
            raise ConfigurationError("rate limit must be positive")
        self.interval = 1.0 / max_per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_allowed = float("-inf")

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            wait = self._next_allowed - now
            if wait > 0:
                self._sleep(wait)
                now = self._next_allowed
            self._next_allowed = now + self.interval


@dataclass(frozen=True)
class IssueRef:
    lccn: str
    issue_date: date
    edition: int


class ChroniclingAmericaClient:
    def __init__(
        self,
        base_url: str = BASE_URL,
        rate_limit: float = 2.0,
        retries: int = 3,
        backoff: float = 0.5,
        transport: httpx.BaseTransport | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleep
        self._limiter = RateLimiter(rate_limit, clock=clock, sleep=sleep)
        self._client = httpx.Client(transport=transport, timeout=30.0)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ChroniclingAmericaClient":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _get(self, url: str) -> httpx.Response:
        """GET with rate limiting and exponential-backoff retries.

        Retries transport failures and 5xx responses; 404 surfaces as
        NotFoundError immediately.
        """
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            self._limiter.acquire()
            try:
                response = self._client.get(url)
            except httpx.HTTPError as exc:
                last_error = exc
                log.warning("transport error on %s (attempt %d): %s", url, attempt + 1, exc)
                continue
            if response.status_code == 404:
                raise NotFoundError(f"{url} returned 404")
            if response.status_code >= 500:
                last_error = TransportError(f"{url} returned {response.status_code}")
                log.warning("server error on %s (attempt %d)", url, attempt + 1)
                continue
            response.raise_for_status()
            return response
        raise TransportError(f"giving up on {url} after {self.retries + 1} attempts") from last_error

    def title_record(self, lccn: str) -> dict:
        if not _LCCN_RE.match(lccn):
            raise ConfigurationError(f"{lccn!r} does not look like an LCCN")
        return self._get(f"{self.base_url}/lccn/{lccn}.json").json()

    def resolve_newspaper(self, lccn: str, config: CorpusConfig) -> NewspaperSpec:
        """Merge the remote title record with the local stance/region entry."""
        local = config.spec(lccn)  # raises ConfigurationError when unlisted
        record = self.title_record(lccn)
        title = record.get("name", local.title) or local.title
        frequency = local.frequency or record.get("frequency", "")
        return NewspaperSpec(
            lccn=lccn,
            title=title,
            stance=local.stance,
            region=local.region,
            frequency=frequency,
            date_start=local.date_start,
            date_end=local.date_end,
        )

    def list_issues(
        self, spec: NewspaperSpec, date_from: date, date_to: date
    ) -> list[IssueRef]:
        """Issue references in range, ascending by (date, edition)."""
        lo = max(date_from, spec.date_start)
        hi = min(date_to, spec.date_end)
        if lo > hi:
            return []
        record = self.title_record(spec.lccn)
        refs = []
        for issue in record.get("issues", []):
            issued = date.fromisoformat(issue["date_issued"])
            if not lo <= issued <= hi:
                continue
            match = _EDITION_RE.search(issue.get("url", ""))
            edition = int(match.group(1)) if match else 1
            refs.append(IssueRef(spec.lccn, issued, edition))
        refs.sort(key=lambda r: (r.issue_date, r.edition))
        return refs

    def issue_pages(self, ref: IssueRef) -> list[int]:
        url = f"{self.base_url}/lccn/{ref.lccn}/{ref.issue_date.isoformat()}/ed-{ref.edition}.json"
        record = self._get(url).json()
        return sorted(int(p["sequence"]) for p in record.get("pages", []))

    def fetch_page_ocr(self, ref: IssueRef, sequence: int) -> PageDocument:
        url = (
            f"{self.base_url}/lccn/{ref.lccn}/{ref.issue_date.isoformat()}"
            f"/ed-{ref.edition}/seq-{sequence}/ocr.txt"
        )
        response = self._get(url)
        try:
            text = response.content.decode("utf-8")
        except UnicodeDecodeError:
            text = response.content.decode("utf-8", errors="replace")
            log.warning("non-UTF8 bytes in %s replaced", url)
        lines = tuple(text.split("\n")) if text else ()
        return PageDocument(
            lccn=ref.lccn,
            issue_date=ref.issue_date,
            edition=ref.edition,
            sequence=sequence,
            lines=lines,
            source_url=url,
        )


def ingest_corpus(
    client: ChroniclingAmericaClient,
    config: CorpusConfig,
    date_from: date,
    date_to: date,
    store: CorpusStore,
    parallelism: int = 4,
    lccns: Iterable[str] | None = None,
) -> int:
    """Fetch every page in range for the configured newspapers.

    Page fetches run concurrently under the client's shared rate
    limiter; the store write is serialized at the end of each issue.
    """
    targets = list(lccns) if lccns is not None else list(config.newspapers)
    fetched = 0
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        for lccn in targets:
            spec = config.spec(lccn)
            for ref in client.list_issues(spec, date_from, date_to):
                sequences = [1] if config.pages == "first" else client.issue_pages(ref)
                docs = list(
                    pool.map(lambda s: client.fetch_page_ocr(ref, s), sequences)
                )
                fetched += store.persist(docs)
    return fetched

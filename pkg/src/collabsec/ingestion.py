"""Record parsing, email extraction and breach enrichment.

Two breach clients share one response parser: :class:`FixtureBreachClient`
reads a JSON file shaped like the HIBP ``breachedaccount`` response, and
:class:`HttpBreachClient` queries the live v3 API under a rate limiter.
"""

from __future__ import annotations

import json
import logging
import os
import re
import time
from collections import Counter
from dataclasses import dataclass, replace
from datetime import date
from typing import IO, Callable, Iterable, Mapping, Protocol, Sequence
from urllib.parse import quote

import httpx

from .errors import BreachLookupError, EnrichmentError, RecordParseError
from .network import CollaborationNetwork, EmailIdentity

log = logging.getLogger(__name__)

API_KEY_ENV = "HIBP_API_KEY"
DEFAULT_BASE_URL = "https://haveibeenpwned.com"
DEFAULT_MIN_INTERVAL_MS = 1600


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    emails: tuple[EmailIdentity, ...] = ()

    def __post_init__(self):
        if not self.paper_id:
            raise ValueError("paper_id must be non-empty")


def parse_records(
    stream: IO[bytes] | IO[str],
    *,
    lenient: bool = False,
    stats: Counter | None = None,
) -> list[PaperRecord]:
    """Parse a JSON Lines record stream.

    Each non-blank line is ``{"paper_id": str, "emails": [str, ...]}``.
    Malformed emails are dropped and counted under ``stats["skipped_emails"]``.
    A line violating the schema raises :class:`RecordParseError` unless
    ``lenient`` is set, in which case it is counted under
    ``stats["skipped_lines"]``.
    """
    stats = stats if stats is not None else Counter()
    records = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("expected a JSON object")
            paper_id = obj.get("paper_id")
            emails = obj.get("emails")
            if not isinstance(paper_id, str) or not paper_id:
                raise ValueError("missing or empty 'paper_id'")
            if not isinstance(emails, list):
                raise ValueError("missing 'emails' array")
        except ValueError as exc:
            if not lenient:
                raise RecordParseError(lineno, str(exc)) from None
            stats["skipped_lines"] += 1
            log.warning("skipping line %d: %s", lineno, exc)
            continue
        parsed = []
        for item in emails:
            try:
                if not isinstance(item, str):
                    raise ValueError(item)
                parsed.append(EmailIdentity.parse(item))
            except ValueError:
                stats["skipped_emails"] += 1
        records.append(PaperRecord(paper_id, tuple(parsed)))
    if stats["skipped_emails"]:
        log.warning("skipped %d malformed email(s)", stats["skipped_emails"])
    return records


def serialize_records(records: Iterable[PaperRecord]) -> bytes:
    lines = [
        json.dumps({"paper_id": r.paper_id, "emails": [str(e) for e in r.emails]})
        for r in records
    ]
    return "".join(line + "\n" for line in lines).encode("utf-8")


# An optional "}" between local part and "@" lets "{a, b}@x.edu" yield b@x.edu;
# brace groups are never expanded.
_EMAIL_IN_TEXT = re.compile(
    r"([A-Za-z0-9._%+-]+)\}?@([A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+)"
)


def extract_emails(snippet: str) -> list[EmailIdentity]:
    """All email-looking substrings of ``snippet``, in order, duplicates kept."""
    out = []
    for m in _EMAIL_IN_TEXT.finditer(snippet):
        try:
            out.append(EmailIdentity.parse(f"{m.group(1)}@{m.group(2)}"))
        except ValueError:
            continue
    return out


# -- breaches ----------------------------------------------------------------


@dataclass(frozen=True)
class BreachDescriptor:
    name: str
    breach_domain: str = ""
    breach_date: date | None = None
    data_classes: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.name:
            raise ValueError("breach name must be non-empty")


@dataclass(frozen=True)
class BreachReport:
    email: EmailIdentity
    breaches: tuple[BreachDescriptor, ...] = ()

    @property
    def services(self) -> frozenset[str]:
        return frozenset(b.name for b in self.breaches)


def parse_breach_list(payload) -> tuple[BreachDescriptor, ...]:
    """Parse an array of HIBP breach objects (``Name``, ``Domain``, ...)."""
    if not isinstance(payload, list):
        raise BreachLookupError("breach payload must be a JSON array")
    out = []
    for item in payload:
        if not isinstance(item, Mapping) or not item.get("Name"):
            raise BreachLookupError(f"malformed breach object: {item!r}")
        raw_date = item.get("BreachDate")
        out.append(
            BreachDescriptor(
                name=item["Name"],
                breach_domain=item.get("Domain") or "",
                breach_date=date.fromisoformat(raw_date) if raw_date else None,
                data_classes=frozenset(item.get("DataClasses") or ()),
            )
        )
    return tuple(out)


class BreachClient(Protocol):
    def lookup(self, email: EmailIdentity) -> BreachReport: ...


class FixtureBreachClient:
    """Offline client backed by ``{email: [breach objects]}``."""

    def __init__(self, table: Mapping[str, list]):
        self._table = {k.strip().lower(): v for k, v in table.items()}

    @classmethod
    def from_file(cls, path) -> "FixtureBreachClient":
        with open(path, encoding="utf-8") as fp:
            return cls(json.load(fp))

    def lookup(self, email: EmailIdentity) -> BreachReport:
        payload = self._table.get(str(email))
        if payload is None:
            return BreachReport(email)
        return BreachReport(email, parse_breach_list(payload))


class RateLimiter:
    """Keeps consecutive calls at least ``min_interval`` seconds apart."""

    def __init__(
        self,
        min_interval: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.min_interval = min_interval
        self.clock = clock
        self.sleep = sleep
        self._last: float | None = None

    def wait(self) -> None:
        if self._last is not None:
            remaining = self._last + self.min_interval - self.clock()
            if remaining > 0:
                self.sleep(remaining)
        self._last = self.clock()


class HttpBreachClient:
    """HIBP v3 ``breachedaccount`` client.

    404 means a clean account. 429 responses are retried up to
    ``max_retries`` times after the server's ``Retry-After`` delay, as are
    transport errors. Any other status raises :class:`BreachLookupError`.
    """

    def __init__(
        self,
        api_key: str | None = None,
        *,
        base_url: str = DEFAULT_BASE_URL,
        min_interval_ms: int = DEFAULT_MIN_INTERVAL_MS,
        max_retries: int = 3,
        user_agent: str = "collabsec",
        http: httpx.Client | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        api_key = api_key or os.environ.get(API_KEY_ENV)
        if not api_key:
            raise BreachLookupError(f"no API key (set {API_KEY_ENV})")
        self.base_url = base_url.rstrip("/")
        self.max_retries = max_retries
        self.sleep = sleep
        self.limiter = RateLimiter(min_interval_ms / 1000.0, clock, sleep)
        self.http = http or httpx.Client(timeout=30.0)
        self.headers = {"hibp-api-key": api_key, "user-agent": user_agent}

    def _get(self, email: EmailIdentity) -> httpx.Response:
        url = f"{self.base_url}/api/v3/breachedaccount/{quote(str(email), safe='')}"
        self.limiter.wait()
        return self.http.get(
            url, params={"truncateResponse": "false"}, headers=self.headers
        )

    def lookup(self, email: EmailIdentity) -> BreachReport:
        for attempt in range(self.max_retries + 1):
            try:
                resp = self._get(email)
            except httpx.TransportError as exc:
                if attempt == self.max_retries:
                    raise BreachLookupError(f"{email}: {exc}") from exc
                continue
            if resp.status_code == 404:
                return BreachReport(email)
            if resp.status_code == 200:
                return BreachReport(email, parse_breach_list(resp.json()))
            if resp.status_code == 429 and attempt < self.max_retries:
                delay = float(resp.headers.get("retry-after", "2"))
                log.info("rate limited on %s; retrying in %.1fs", email, delay)
                self.sleep(delay)
                continue
            raise BreachLookupError(f"{email}: HTTP {resp.status_code}")
        raise AssertionError("unreachable")


def enrich(
    g: CollaborationNetwork,
    client: BreachClient,
    *,
    max_failure_fraction: float = 0.1,
    failures: list | None = None,
) -> CollaborationNetwork:
    """Attach breach counts and breached-service names to every node.

    Lookups run one at a time. A failed lookup leaves the node at zero
    breaches and is appended to ``failures``; if more than
    ``max_failure_fraction`` of lookups fail the whole enrichment aborts.
    """
    failures = failures if failures is not None else []
    nodes = []
    for node in g.nodes:
        try:
            report = client.lookup(node.email)
        except BreachLookupError as exc:
            log.warning("breach lookup failed for node %d: %s", node.id, exc)
            failures.append((node.id, str(exc)))
            nodes.append(_with_breaches(node, ()))
            continue
        nodes.append(_with_breaches(node, report.breaches))
    if g.n_nodes and len(failures) > max_failure_fraction * g.n_nodes:
        raise EnrichmentError(
            f"{len(failures)} of {g.n_nodes} breach lookups failed"
        )
    return g.with_nodes(nodes)


def _with_breaches(node, breaches: Sequence[BreachDescriptor]):
    return replace(
        node,
        breach_count=len(breaches),
        services=frozenset(b.name for b in breaches),
    )

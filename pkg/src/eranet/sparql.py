"""Paginated retrieval of influence triples from a SPARQL endpoint.

The query template must select ``?source`` and ``?target`` and may select
``?sourceLabel``, ``?sourceBirth``, ``?sourceDeath`` and the matching
``?target*`` variables. The literal tokens ``{limit}`` and ``{offset}`` in
the template are replaced for every page (``str.format`` is not used, since
SPARQL is full of braces).
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field

import requests

from eranet.errors import FetchError
from eranet.ingest import RawActorRecord, Reject
from eranet.model import InfluenceEdge

logger = logging.getLogger(__name__)

ENDPOINT_ENV = "ERANET_SPARQL_ENDPOINT"
MAX_ATTEMPTS = 3

_YEAR = re.compile(r"^\s*([+-]?\d{1,6})")


@dataclass
class FetchResult:
    actors: list[RawActorRecord]
    edges: list[InfluenceEdge]
    rejects: list[Reject] = field(default_factory=list)
    pages: int = 0


def local_name(value: str) -> str:
    """Last path or fragment segment of an IRI; plain strings pass through."""
    value = value.strip()
    if value.startswith("<") and value.endswith(">"):
        value = value[1:-1]
    if "://" in value:
        value = re.split(r"[/#]", value.rstrip("/#"))[-1]
    return value


def parse_year(value: str | None) -> int | None:
    """Year from an xsd:date/gYear lexical form such as ``-0384-01-01`` or ``1724``."""
    if value is None or not value.strip():
        return None
    m = _YEAR.match(value)
    if not m:
        raise ValueError(f"unparseable year {value!r}")
    return int(m.group(1))


def render_query(template: str, limit: int, offset: int) -> str:
    return template.replace("{limit}", str(limit)).replace("{offset}", str(offset))


def _request_page(session: requests.Session, url: str, query: str, timeout: float, backoff: float, method: str):
    last_error: Exception | None = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        started = time.perf_counter()
        try:
            if method == "POST":
                resp = session.post(url, data={"query": query},
                                    headers={"Accept": "application/sparql-results+json"}, timeout=timeout)
            else:
                resp = session.get(url, params={"query": query},
                                   headers={"Accept": "application/sparql-results+json"}, timeout=timeout)
            elapsed = time.perf_counter() - started
            logger.info("%s %s -> %s in %.3fs (attempt %d)", method, url, resp.status_code, elapsed, attempt)
            if resp.status_code >= 500 or resp.status_code == 429:
                last_error = FetchError(f"HTTP {resp.status_code} from {url}")
            elif resp.status_code >= 400:
                raise FetchError(f"HTTP {resp.status_code} from {url}: {resp.text[:200]}")
            else:
                try:
                    return resp.json()
                except ValueError as exc:
                    raise FetchError(f"non-JSON response from {url}") from exc
        except requests.RequestException as exc:
            logger.info("%s %s failed after %.3fs: %s", method, url, time.perf_counter() - started, exc)
            last_error = exc
        if attempt < MAX_ATTEMPTS:
            time.sleep(backoff * 2 ** (attempt - 1))
    raise FetchError(f"giving up on {url} after {MAX_ATTEMPTS} attempts: {last_error}")


def _binding(row: dict, name: str) -> str | None:
    cell = row.get(name)
    if cell is None:
        return None
    return cell.get("value")


def fetch_sparql(
    endpoint_url: str | None,
    query_template: str,
    page_size: int = 1000,
    *,
    session: requests.Session | None = None,
    timeout: float = 60.0,
    backoff: float = 1.0,
    method: str = "GET",
) -> FetchResult:
    """Page through the endpoint until an empty page comes back.

    Transport errors and 5xx responses are retried up to three attempts with
    exponential backoff (``backoff``, ``2*backoff``) before :class:`FetchError`
    is raised. Rows with an empty source or target, or an unreadable year,
    are collected as rejects. The ``ERANET_SPARQL_ENDPOINT`` environment
    variable overrides ``endpoint_url``.
    """
    url = os.environ.get(ENDPOINT_ENV) or endpoint_url
    if not url:
        raise FetchError("no SPARQL endpoint configured")
    if page_size < 1:
        raise ValueError("page_size must be positive")
    session = session or requests.Session()
    actors: dict[str, RawActorRecord] = {}
    edges: dict[InfluenceEdge, None] = {}
    rejects: list[Reject] = []
    offset = pages = 0
    while True:
        payload = _request_page(session, url, render_query(query_template, page_size, offset),
                                timeout, backoff, method.upper())
        try:
            rows = payload["results"]["bindings"]
        except (KeyError, TypeError) as exc:
            raise FetchError(f"malformed SPARQL-JSON from {url}") from exc
        if not rows:
            break
        pages += 1
        for i, row in enumerate(rows):
            line = offset + i + 1
            source = local_name(_binding(row, "source") or "")
            target = local_name(_binding(row, "target") or "")
            if not source or not target:
                rejects.append(Reject(url, line, "empty subject or object id", repr(row)))
                continue
            if source == target:
                rejects.append(Reject(url, line, f"self-loop at {source}", repr(row)))
                continue
            try:
                pair = [
                    RawActorRecord(
                        actor_id,
                        _binding(row, f"{role}Label") or actor_id,
                        parse_year(_binding(row, f"{role}Birth")),
                        parse_year(_binding(row, f"{role}Death")),
                    )
                    for role, actor_id in (("source", source), ("target", target))
                ]
            except ValueError as exc:
                rejects.append(Reject(url, line, str(exc), repr(row)))
                continue
            for rec in pair:
                prev = actors.get(rec.id)
                if prev is None or _known_dates(rec) > _known_dates(prev):
                    actors[rec.id] = rec
            edges[InfluenceEdge(source, target)] = None
        offset += len(rows)
    logger.info("fetched %d edges among %d actors in %d page(s)", len(edges), len(actors), pages)
    return FetchResult(sorted(actors.values(), key=lambda r: r.id), list(edges), rejects, pages)


def _known_dates(rec: RawActorRecord) -> int:
    return (rec.birth_year is not None) + (rec.death_year is not None)

"""HTTP client for the SPARQL 1.1 protocol with politeness and fallbacks."""

from __future__ import annotations

import logging
import random
import threading
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional
from urllib.parse import urlparse

import requests

from ..errors import (
    EndpointError,
    MalformedResponse,
    NetworkUnreachable,
    ProbeAmbiguous,
    QueryTimeout,
    SparqlError,
    UnsupportedTemplate,
)
from . import templates
from .results import MEDIA_TYPE, QueryResult, parse
from .terms import IRI, RDF_TYPE, XSD_INTEGER, Literal, term_sort_key

logger = logging.getLogger(__name__)

VERSIONS = ("auto", "v1_0", "v1_1")
POST_THRESHOLD = 2000


@dataclass(frozen=True)
class CapabilityProfile:
    version: str = "v1_1"
    supports_group_by: bool = True
    supports_bind: bool = True
    supports_order_by_rand: bool = True
    supports_named_graphs: bool = True

    def __post_init__(self):
        if self.version not in ("v1_0", "v1_1"):
            raise ValueError(f"unknown SPARQL version {self.version!r}")
        if self.version == "v1_0" and (self.supports_group_by or self.supports_bind):
            raise ValueError("SPARQL 1.0 endpoints cannot support GROUP BY or BIND")

    def allows(self, feature: str) -> bool:
        return getattr(self, f"supports_{feature}")

    @classmethod
    def full(cls) -> "CapabilityProfile":
        return cls()

    @classmethod
    def minimal(cls) -> "CapabilityProfile":
        """SPARQL 1.0 with named graphs only; every template takes its fallback."""
        return cls("v1_0", False, False, False, True)


@dataclass(frozen=True)
class EndpointDescriptor:
    """A remote endpoint plus politeness settings.

    ``timeout`` is in seconds, ``politeness_delay`` in milliseconds.
    """

    id: str
    url: str
    declared_version: str = "auto"
    timeout: float = 60.0
    max_retries: int = 3
    politeness_delay: float = 1000.0
    capability: Optional[CapabilityProfile] = None

    def __post_init__(self):
        parsed = urlparse(self.url)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise ValueError(f"endpoint url must be an absolute HTTP(S) URL: {self.url!r}")
        if self.declared_version not in VERSIONS:
            raise ValueError(f"declared_version must be one of {VERSIONS}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0 or self.politeness_delay < 0:
            raise ValueError("max_retries and politeness_delay must be non-negative")

    def with_capability(self, capability: CapabilityProfile) -> "EndpointDescriptor":
        return replace(self, capability=capability)


class PolitenessLimiter:
    """Serialises requests per endpoint and spaces them by a minimum delay.

    The delay is measured from the end of one request to the start of the
    next, so spacing observed at the server is never shorter than the delay.
    """

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._last_end: dict[str, float] = {}

    @contextmanager
    def slot(self, key: str, delay_ms: float) -> Iterator[None]:
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            last = self._last_end.get(key)
            if last is not None:
                wait = last + delay_ms / 1000.0 - time.monotonic()
                if wait > 0:
                    time.sleep(wait)
            try:
                yield
            finally:
                self._last_end[key] = time.monotonic()


_LIMITER = PolitenessLimiter()


@dataclass(frozen=True)
class SparqlClient:
    """Stateless query executor; the shared politeness limiter is its only mutable part.

    Args:
        backoff_base: first retry delay in seconds; doubles per attempt.
        backoff_cap: upper bound on any single retry delay.
    """

    backoff_base: float = 1.0
    backoff_cap: float = 30.0
    limiter: PolitenessLimiter = field(default=_LIMITER, compare=False, repr=False)

    # -- raw protocol -------------------------------------------------------

    def _send(self, endpoint: EndpointDescriptor, query: str) -> requests.Response:
        headers = {"Accept": MEDIA_TYPE}
        with self.limiter.slot(endpoint.url, endpoint.politeness_delay):
            if len(query) < POST_THRESHOLD:
                return requests.get(endpoint.url, params={"query": query},
                                    headers=headers, timeout=endpoint.timeout)
            return requests.post(endpoint.url, data={"query": query},
                                 headers=headers, timeout=endpoint.timeout)

    def execute(self, endpoint: EndpointDescriptor, query: str) -> QueryResult:
        """Run one SELECT query, retrying timeouts and 5xx responses."""
        if not query or not query.strip():
            raise ValueError("query text must be non-empty")
        last_error: SparqlError | None = None
        for attempt in range(endpoint.max_retries + 1):
            if attempt:
                delay = min(self.backoff_base * 2 ** (attempt - 1), self.backoff_cap)
                logger.debug("retry %d for %s in %.2fs", attempt, endpoint.id, delay)
                time.sleep(delay)
            try:
                response = self._send(endpoint, query)
            except requests.Timeout:
                last_error = QueryTimeout(f"{endpoint.id}: no answer within {endpoint.timeout}s")
                continue
            except requests.ConnectionError as exc:
                raise NetworkUnreachable(f"{endpoint.id} ({endpoint.url}): {exc}") from exc
            if response.status_code >= 500:
                last_error = EndpointError(response.status_code, response.text)
                continue
            if response.status_code != 200:
                raise EndpointError(response.status_code, response.text)
            return parse(response.content)
        assert last_error is not None
        raise last_error

    # -- capability probing ------------------------------------------------

    def _probe(self, endpoint: EndpointDescriptor, probe_id: str) -> bool:
        try:
            self.execute(endpoint, templates.PROBES[probe_id])
            return True
        except NetworkUnreachable:
            raise
        except SparqlError as exc:
            logger.info("%s: probe %s failed: %s", endpoint.id, probe_id, exc)
            return False

    def detect_capabilities(self, endpoint: EndpointDescriptor) -> CapabilityProfile:
        """Probe which SPARQL keywords the endpoint accepts.

        A declared version other than ``auto`` is trusted; for ``v1_0``
        GROUP BY and BIND are not probed at all.
        """
        ping = self._probe(endpoint, "PING")
        v10 = endpoint.declared_version == "v1_0"
        group_by = False if v10 else self._probe(endpoint, "PROBE_GROUP_BY")
        bind = False if v10 else self._probe(endpoint, "PROBE_BIND")
        rand = self._probe(endpoint, "PROBE_RAND")
        graphs = self._probe(endpoint, "PROBE_GRAPH")
        if not (ping or group_by or bind or rand or graphs):
            raise ProbeAmbiguous(f"{endpoint.id}: every probe query failed")
        if endpoint.declared_version != "auto":
            version = endpoint.declared_version
        else:
            version = "v1_1" if (group_by or bind) else "v1_0"
        if version == "v1_0":
            group_by = bind = False
        return CapabilityProfile(version, group_by, bind, rand, graphs)

    def probe(self, endpoint: EndpointDescriptor) -> EndpointDescriptor:
        return endpoint.with_capability(self.detect_capabilities(endpoint))

    # -- templates -----------------------------------------------------------

    def execute_template(self, endpoint: EndpointDescriptor, template_id: str,
                         params: dict[str, str] | None = None, *,
                         limit: int = templates.DEFAULT_SAMPLE, seed: int = 0,
                         form: str = "auto") -> QueryResult:
        """Run SQ1..SQ5 and return rows in the canonical result shape.

        ``form`` is ``auto`` (canonical when the capability profile allows it,
        falling back once on QueryTimeout), ``canonical`` or ``fallback``.
        ``limit`` is the sample size for SQ4/SQ5; ``seed`` drives client-side
        subsampling on the fallback path.
        """
        params = dict(params or {})
        templates.render(template_id, params, limit=limit)  # validates params
        cap = endpoint.capability or CapabilityProfile.full()
        if not cap.supports_named_graphs:
            raise UnsupportedTemplate(f"{endpoint.id}: {template_id} needs GRAPH support")
        canonical_ok = all(cap.allows(f) for f in templates.CANONICAL_NEEDS[template_id])
        if form == "fallback" or (form == "auto" and not canonical_ok):
            return self._run_fallback(endpoint, template_id, params, limit, seed)
        if form == "canonical" and not canonical_ok:
            raise UnsupportedTemplate(f"{endpoint.id}: canonical {template_id} not supported")
        query = templates.render(template_id, params, limit=limit)
        try:
            result = self.execute(endpoint, query)
        except QueryTimeout:
            if form == "canonical":
                raise
            logger.warning("%s: %s timed out, using fallback form", endpoint.id, template_id)
            return self._run_fallback(endpoint, template_id, params, limit, seed)
        if template_id == "SQ3":
            result = _drop_type_rows(result)
        return result

    def _paginate(self, endpoint, template_id, params, cap=None) -> list[dict]:
        rows: list[dict] = []
        offset = 0
        while True:
            page_size = templates.PAGE_SIZE
            if cap is not None:
                page_size = min(page_size, cap - len(rows))
                if page_size <= 0:
                    break
            query = templates.render_fallback(template_id, params, limit=page_size, offset=offset)
            page = self.execute(endpoint, query).rows
            rows.extend(page)
            if len(page) < page_size:
                break
            offset += page_size
        return rows

    def _run_fallback(self, endpoint, template_id, params, limit, seed) -> QueryResult:
        if template_id == "SQ1":
            rows = self._paginate(endpoint, "SQ1", params)
            return QueryResult(["g"], [{"g": r["g"]} for r in rows if "g" in r])
        if template_id == "SQ2":
            counts = Counter(r["Concept"] for r in self._paginate(endpoint, "SQ2", params))
            ordered = sorted(counts.items(), key=lambda kv: (-kv[1], term_sort_key(kv[0])))
            return QueryResult(["Concept", "cCount"], [
                {"Concept": c, "cCount": Literal(str(n), XSD_INTEGER)} for c, n in ordered
            ])
        if template_id == "SQ3":
            return _aggregate_sq3(self._paginate(endpoint, "SQ3", params))
        rows = self._paginate(endpoint, template_id, params, cap=templates.FALLBACK_FETCH_CAP)
        values = [r["x"] for r in rows if "x" in r]
        if len(values) > limit:
            key = f"{seed}|{template_id}|" + "|".join(f"{k}={params[k]}" for k in sorted(params))
            values = random.Random(key).sample(values, limit)
        return QueryResult(["x"], [{"x": v} for v in values])


def _drop_type_rows(result: QueryResult) -> QueryResult:
    # FILTER(!(?p = 'rdf:type')) compares an IRI with a string and never
    # fires on real endpoints, so rdf:type rows are removed here.
    rows = [r for r in result.rows if r.get("p") != IRI(RDF_TYPE)]
    return QueryResult(result.variables, rows)


def _aggregate_sq3(rows: list[dict]) -> QueryResult:
    counts: Counter = Counter()
    for r in rows:
        p = r.get("p")
        if p is None or p == IRI(RDF_TYPE):
            continue
        o = r.get("o")
        val_type = IRI(o.effective_datatype()) if isinstance(o, Literal) else None
        counts[(p, r.get("c"), val_type)] += 1

    def key(item):
        (p, c, vt), n = item
        return (-n, term_sort_key(p), c.value if c else "", vt.value if vt else "")

    out = []
    for (p, c, vt), n in sorted(counts.items(), key=key):
        row = {"p": p, "count": Literal(str(n), XSD_INTEGER)}
        if c is not None:
            row["c"] = c
        if vt is not None:
            row["valType"] = vt
        out.append(row)
    return QueryResult(["p", "c", "count", "valType"], out)


_DEFAULT = SparqlClient()


def execute(endpoint: EndpointDescriptor, query_text: str) -> QueryResult:
    return _DEFAULT.execute(endpoint, query_text)


def detect_capabilities(endpoint: EndpointDescriptor) -> CapabilityProfile:
    return _DEFAULT.detect_capabilities(endpoint)


def execute_template(endpoint: EndpointDescriptor, template_id: str,
                     params: dict[str, str] | None = None, **kwargs) -> QueryResult:
    return _DEFAULT.execute_template(endpoint, template_id, params, **kwargs)

"""Schema fragment extraction from one SPARQL endpoint.

For every named graph: list classes with instance counts, sample instances
of each class, list the properties each class is the domain of (with range
class or datatype and assertion counts), and sample assertion values per
class/property pair.  Samples are summarised into :class:`ValueSummary`.
"""

from __future__ import annotations

import logging
import re
import statistics
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .errors import EndpointUnusable, SparqlError
from .sparql.client import EndpointDescriptor, SparqlClient
from .sparql.terms import (
    IRI,
    RDF_LANGSTRING,
    XSD_DATE,
    XSD_DATETIME,
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Literal,
    Term,
    is_absolute_iri,
    term_from_json,
    term_sort_key,
    term_to_json,
)

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_N = 2000
CATEGORICAL_THRESHOLD = 0.1
DEFAULT_CLASS_CAP = 10_000
ANONYMOUS = "anonymous"
FORMAT_VERSION = 1


# -- value summaries ---------------------------------------------------------

def namespace_of(iri: str) -> str:
    """IRI truncated after its rightmost '/', '#' or ':'."""
    cut = max(iri.rfind("/"), iri.rfind("#"), iri.rfind(":"))
    return iri[:cut + 1] if cut >= 0 else iri


def local_name(iri: str) -> str:
    return iri[len(namespace_of(iri)):]


_RUNS = re.compile(r"[0-9]+|[a-z]+")


def uri_pattern(iri: str) -> str:
    """Generalise the local part of an IRI: digit runs and lowercase runs."""
    ns = namespace_of(iri)
    local = _RUNS.sub(lambda m: r"\d+" if m.group().isdigit() else "[a-z]+", iri[len(ns):])
    return ns + local


_INT = re.compile(r"[+-]?\d+\Z")
_FLOAT = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z")
_DATE = re.compile(r"\d{4}-\d{2}-\d{2}\Z")
_DATETIME = re.compile(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:\d{2})?\Z")


def _guess_datatype(lexicals: Sequence[str]) -> str:
    for rx, dt in ((_INT, XSD_INTEGER), (_FLOAT, XSD_FLOAT), (_DATE, XSD_DATE), (_DATETIME, XSD_DATETIME)):
        if all(rx.match(v.strip()) for v in lexicals):
            return dt
    return XSD_STRING


def as_term(value) -> Term:
    if isinstance(value, (IRI, Literal, BlankNode)):
        return value
    if isinstance(value, str):
        return IRI(value) if is_absolute_iri(value) and "://" in value else Literal(value)
    if isinstance(value, bool):
        return Literal(str(value).lower(), "http://www.w3.org/2001/XMLSchema#boolean")
    if isinstance(value, int):
        return Literal(str(value), XSD_INTEGER)
    if isinstance(value, float):
        return Literal(repr(value), XSD_FLOAT)
    raise TypeError(f"cannot summarise value of type {type(value).__name__}")


@dataclass
class ValueSummary:
    sample_size: int = 0
    is_categorical: bool = False
    inferred_datatype: Optional[str] = None
    namespaces: dict[str, int] = field(default_factory=dict)
    median_length: Optional[float] = None
    uri_patterns: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "is_categorical": self.is_categorical,
            "inferred_datatype": self.inferred_datatype,
            "namespaces": dict(sorted(self.namespaces.items())),
            "median_length": self.median_length,
            "uri_patterns": dict(sorted(self.uri_patterns.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ValueSummary":
        return cls(d["sample_size"], d["is_categorical"], d["inferred_datatype"],
                   dict(d["namespaces"]), d["median_length"], dict(d["uri_patterns"]))


def summarize(values: Iterable, categorical_threshold: float = CATEGORICAL_THRESHOLD) -> ValueSummary:
    terms = [as_term(v) for v in values]
    if not terms:
        return ValueSummary()
    n = len(terms)
    iris = [t.value for t in terms if isinstance(t, IRI)]
    literals = [t for t in terms if isinstance(t, Literal)]
    datatype = None
    if literals:
        declared = Counter(RDF_LANGSTRING if t.lang else t.datatype for t in literals
                           if t.lang or t.datatype)
        if declared:
            top = max(declared.values())
            datatype = min(dt for dt, k in declared.items() if k == top)
        else:
            datatype = _guess_datatype([t.value for t in literals])
    median = statistics.median(len(t.lexical()) for t in terms)
    return ValueSummary(
        sample_size=n,
        is_categorical=len(set(terms)) / n <= categorical_threshold,
        inferred_datatype=datatype,
        namespaces=dict(Counter(namespace_of(i) for i in iris)),
        median_length=float(median),
        uri_patterns=dict(Counter(uri_pattern(i) for i in iris)),
    )


# -- fragments -----------------------------------------------------------------

@dataclass
class ClassProfile:
    uri: str
    count: int
    sample: list[Term] = field(default_factory=list)
    summary: ValueSummary = field(default_factory=ValueSummary)
    error: Optional[str] = None
    mismatch_suspect: bool = False


@dataclass
class PropertyRealization:
    domain: str
    property: str
    kind: str  # "object" | "data"
    range: Optional[str]
    count: int
    sample: list[Term] = field(default_factory=list)
    summary: ValueSummary = field(default_factory=ValueSummary)
    error: Optional[str] = None


@dataclass
class SchemaFragment:
    graph_uri: str
    classes: list[ClassProfile] = field(default_factory=list)
    property_realizations: list[PropertyRealization] = field(default_factory=list)
    error: Optional[str] = None

    def class_uris(self) -> set[str]:
        return {c.uri for c in self.classes}

    def to_dict(self, source: str | None = None) -> dict:
        by_prop: dict[str, list[PropertyRealization]] = {}
        for r in self.property_realizations:
            by_prop.setdefault(r.property, []).append(r)
        return {
            "Source": source,
            "Source URI": self.graph_uri,
            "Error": self.error,
            "Classes": [
                {
                    "Class": local_name(c.uri) or c.uri,
                    "Class URI": c.uri,
                    "Instance Count": c.count,
                    "Sample Instances": [term_to_json(t) for t in c.sample],
                    "Summary": c.summary.to_dict(),
                    "Mismatch Suspect": c.mismatch_suspect,
                    "Error": c.error,
                }
                for c in self.classes
            ],
            "Properties": [
                {
                    "Property": local_name(p) or p,
                    "Property URI": p,
                    "Property Realizations": [
                        {
                            "Kind": "Object Property" if r.kind == "object" else "Data Property",
                            "Domain": r.domain,
                            "Range": r.range,
                            "Assertion Count": r.count,
                            "Sample Assertion Values": [term_to_json(t) for t in r.sample],
                            "Summary": r.summary.to_dict(),
                            "Error": r.error,
                        }
                        for r in rs
                    ],
                }
                for p, rs in sorted(by_prop.items())
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SchemaFragment":
        classes = [
            ClassProfile(c["Class URI"], c["Instance Count"],
                         [term_from_json(t) for t in c["Sample Instances"]],
                         ValueSummary.from_dict(c["Summary"]), c.get("Error"),
                         c.get("Mismatch Suspect", False))
            for c in d["Classes"]
        ]
        reals = [
            PropertyRealization(r["Domain"], p["Property URI"],
                                "object" if r["Kind"] == "Object Property" else "data",
                                r["Range"], r["Assertion Count"],
                                [term_from_json(t) for t in r["Sample Assertion Values"]],
                                ValueSummary.from_dict(r["Summary"]), r.get("Error"))
            for p in d["Properties"] for r in p["Property Realizations"]
        ]
        frag = cls(d["Source URI"], classes, [], d.get("Error"))
        frag.property_realizations = _sorted_realizations(reals)
        return frag


def _sorted_realizations(reals: list[PropertyRealization]) -> list[PropertyRealization]:
    return sorted(reals, key=lambda r: (r.domain, r.property, r.kind, r.range or ""))


def _int(term) -> int:
    return int(term.value) if term is not None else 0


def _sorted_terms(terms: Iterable[Term]) -> list[Term]:
    return sorted(terms, key=term_sort_key)


# -- extraction ----------------------------------------------------------------

@dataclass
class Extractor:
    """Runs the five-query extraction against one endpoint at a time.

    Args:
        sample_n: instances / assertions sampled per class and per pair.
        class_cap: classes beyond this many (smallest counts first) are kept
            with their counts only and flagged ``mismatch_suspect``.
    """

    client: SparqlClient = field(default_factory=SparqlClient)
    sample_n: int = DEFAULT_SAMPLE_N
    seed: int = 0
    class_cap: int = DEFAULT_CLASS_CAP
    categorical_threshold: float = CATEGORICAL_THRESHOLD

    def _template(self, endpoint, tid, params):
        return self.client.execute_template(endpoint, tid, params, limit=self.sample_n, seed=self.seed)

    def graphs(self, endpoint: EndpointDescriptor) -> list[str]:
        try:
            result = self._template(endpoint, "SQ1", {})
        except SparqlError as first:
            logger.warning("%s: SQ1 failed (%s); trying fallback form", endpoint.id, first)
            try:
                result = self.client.execute_template(endpoint, "SQ1", {}, form="fallback")
            except SparqlError as exc:
                raise EndpointUnusable(f"{endpoint.id}: cannot list graphs: {exc}") from exc
        return sorted({row["g"].value for row in result.rows if isinstance(row.get("g"), IRI)})

    def extract_endpoint(self, endpoint: EndpointDescriptor) -> dict[str, SchemaFragment]:
        if endpoint.capability is None:
            endpoint = self.client.probe(endpoint)
        return {g: self.extract_graph(endpoint, g) for g in self.graphs(endpoint)}

    def extract_graph(self, endpoint: EndpointDescriptor, graph: str) -> SchemaFragment:
        fragment = SchemaFragment(graph)
        try:
            rows = self._template(endpoint, "SQ2", {"GRAPH_URI": graph}).rows
        except SparqlError as exc:
            fragment.error = f"SQ2: {exc}"
            return fragment
        counts = [(row["Concept"].value, _int(row.get("cCount")))
                  for row in rows if isinstance(row.get("Concept"), IRI)]
        counts.sort(key=lambda uc: (-uc[1], uc[0]))
        for i, (uri, count) in enumerate(counts):
            if i >= self.class_cap:
                fragment.classes.append(ClassProfile(uri, count, mismatch_suspect=True))
                continue
            cls, reals = self._profile_class(endpoint, graph, uri, count)
            fragment.classes.append(cls)
            fragment.property_realizations.extend(reals)
        fragment.classes.sort(key=lambda c: c.uri)
        fragment.property_realizations = _sorted_realizations(fragment.property_realizations)
        return fragment

    def _profile_class(self, endpoint, graph, uri, count):
        params = {"GRAPH_URI": graph, "CONCEPT_URI": uri}
        profile = ClassProfile(uri, count)
        errors = []
        try:
            profile.sample = _sorted_terms(r["x"] for r in self._template(endpoint, "SQ4", params).rows if "x" in r)
            profile.summary = summarize(profile.sample, self.categorical_threshold)
        except SparqlError as exc:
            errors.append(f"SQ4: {exc}")
        try:
            rows = self._template(endpoint, "SQ3", params).rows
        except SparqlError as exc:
            errors.append(f"SQ3: {exc}")
            rows = []
        profile.error = "; ".join(errors) or None

        by_property: dict[str, list[dict]] = {}
        for row in rows:
            if isinstance(row.get("p"), IRI):
                by_property.setdefault(row["p"].value, []).append(row)
        realizations = []
        for prop in sorted(by_property):
            sample, summary, error = [], ValueSummary(), None
            try:
                result = self._template(endpoint, "SQ5", {**params, "PROPERTY_URI": prop})
                sample = _sorted_terms(r["x"] for r in result.rows if "x" in r)
                summary = summarize(sample, self.categorical_threshold)
            except SparqlError as exc:
                error = f"SQ5: {exc}"
            nonliteral = [t for t in sample if not isinstance(t, Literal)]
            untyped_range = ANONYMOUS if nonliteral and all(isinstance(t, BlankNode) for t in nonliteral) else None
            for row in by_property[prop]:
                c, vt = row.get("c"), row.get("valType")
                if c is not None:
                    kind, rng = "object", c.value if isinstance(c, IRI) else ANONYMOUS
                elif vt is not None:
                    kind, rng = "data", vt.value
                else:
                    kind, rng = "object", untyped_range
                realizations.append(PropertyRealization(uri, prop, kind, rng, _int(row.get("count")),
                                                        sample, summary, error))
        return profile, realizations


def extract_endpoint(endpoint: EndpointDescriptor, sample_n: int = DEFAULT_SAMPLE_N, *,
                     seed: int = 0, client: SparqlClient | None = None,
                     class_cap: int = DEFAULT_CLASS_CAP) -> dict[str, SchemaFragment]:
    extractor = Extractor(client or SparqlClient(), sample_n, seed, class_cap)
    return extractor.extract_endpoint(endpoint)


def extract_many(endpoints: Sequence[EndpointDescriptor], extractor: Extractor | None = None,
                 workers: int = 4) -> Iterator[tuple[EndpointDescriptor, dict[str, SchemaFragment] | Exception]]:
    """Extract several endpoints concurrently, yielding results as they finish.

    A failing endpoint yields its exception instead of a fragment map.
    """
    extractor = extractor or Extractor()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {pool.submit(extractor.extract_endpoint, ep): ep for ep in endpoints}
        for fut in as_completed(futures):
            ep = futures[fut]
            try:
                yield ep, fut.result()
            except Exception as exc:  # surfaced to caller per endpoint
                yield ep, exc


def fragments_to_document(endpoint: EndpointDescriptor, fragments: dict[str, SchemaFragment],
                          sources: dict[str, str] | None = None) -> dict:
    sources = sources or {}
    cap = endpoint.capability
    return {
        "format": "lodscope-fragments",
        "version": FORMAT_VERSION,
        "endpoint": {"id": endpoint.id, "url": endpoint.url},
        "capability": None if cap is None else {
            "version": cap.version,
            "supports_group_by": cap.supports_group_by,
            "supports_bind": cap.supports_bind,
            "supports_order_by_rand": cap.supports_order_by_rand,
            "supports_named_graphs": cap.supports_named_graphs,
        },
        "graphs": [fragments[g].to_dict(sources.get(g)) for g in sorted(fragments)],
    }


def fragments_from_document(doc: dict) -> dict[str, SchemaFragment]:
    if doc.get("format") != "lodscope-fragments":
        raise ValueError("not a lodscope fragments document")
    return {g["Source URI"]: SchemaFragment.from_dict(g) for g in doc["graphs"]}

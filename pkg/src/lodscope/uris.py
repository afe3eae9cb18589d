"""URI origins, human-readable labels, namespace variants and semantic mismatch.

An :class:`OriginCatalog` is a list of namespace rules grouped by the
ontology, vocabulary or linked-data source they belong to.  It is used to
say where a schema element comes from, to find several namespaces wrapping
the same external identifier, and to spot sources that type their
instances with classes of a large ontology.
"""

from __future__ import annotations

import csv
import logging
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, NamedTuple, Optional

from .extract import local_name
from .io import write_tsv
from .sparql import templates
from .sparql.terms import Literal

if TYPE_CHECKING:
    from .schema_graph import LslodSchemaGraph
    from .sparql.client import EndpointDescriptor, SparqlClient

logger = logging.getLogger(__name__)

ORIGIN_KINDS = ("bioportal_ontology", "owl_on_web", "lov_vocab", "ld_source")
ONTOLOGY_KINDS = ("bioportal_ontology", "owl_on_web")
LABEL_METHODS = ("catalog_annotation", "endpoint_annotation", "regexp")
MISMATCH_THRESHOLD = 1000


@dataclass(frozen=True)
class NamespaceRule:
    source_id: str
    namespace: re.Pattern
    identifier: Optional[re.Pattern]
    position: int  # index among the rules of the same source; 0 is recommended


@dataclass
class CatalogEntry:
    source_id: str
    kind: str
    rules: list[NamespaceRule] = field(default_factory=list)
    labels: dict[str, str] = field(default_factory=dict)

    @property
    def recommended(self) -> NamespaceRule:
        return self.rules[0]


class Origin(NamedTuple):
    source_id: Optional[str]
    kind: str  # one of ORIGIN_KINDS or "unknown"

    @property
    def known(self) -> bool:
        return self.source_id is not None


UNKNOWN = Origin(None, "unknown")


class OriginMatch(NamedTuple):
    origin: Origin
    namespace: str        # matched prefix of the IRI, original case
    identifier: Optional[str]
    rule_position: int


class OriginCatalog:
    """Ordered namespace rules; the first rule matching a lowercased IRI wins."""

    def __init__(self, entries: Iterable[CatalogEntry] = ()):
        self.entries: dict[str, CatalogEntry] = {}
        self._rules: list[NamespaceRule] = []
        for entry in entries:
            self.add(entry)

    def add(self, entry: CatalogEntry) -> None:
        if entry.source_id in self.entries:
            raise ValueError(f"duplicate catalog source id {entry.source_id!r}")
        if entry.kind not in ORIGIN_KINDS:
            raise ValueError(f"unknown origin kind {entry.kind!r}")
        self.entries[entry.source_id] = entry
        self._rules.extend(entry.rules)

    @classmethod
    def load(cls, path: str | Path) -> "OriginCatalog":
        """Read a catalog TSV.

        Columns are ``source_id, kind, namespace_regex, identifier_regex,
        labels_path``.  Several rows may share a source id; they are its
        namespace variants and the first one is the recommended namespace.
        ``labels_path`` (relative to the catalog file) names an ``iri<TAB>label``
        file.  Lines starting with ``#`` are ignored.
        """
        path = Path(path)
        with open(path, encoding="utf-8", newline="") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        reader = csv.DictReader(lines, delimiter="\t", quoting=csv.QUOTE_NONE)
        entries: dict[str, CatalogEntry] = {}
        order: list[NamespaceRule] = []
        for lineno, row in enumerate(reader, start=2):
            sid, kind = (row.get("source_id") or "").strip(), (row.get("kind") or "").strip()
            if not sid:
                raise ValueError(f"{path}:{lineno}: missing source_id")
            entry = entries.get(sid)
            if entry is None:
                entry = entries[sid] = CatalogEntry(sid, kind)
            elif entry.kind != kind:
                raise ValueError(f"{path}:{lineno}: {sid} declared with kinds {entry.kind} and {kind}")
            try:
                ns = re.compile(row["namespace_regex"].strip())
                ident_text = (row.get("identifier_regex") or "").strip()
                ident = re.compile(ident_text) if ident_text else None
            except re.error as exc:
                raise ValueError(f"{path}:{lineno}: bad regex: {exc}") from exc
            rule = NamespaceRule(sid, ns, ident, len(entry.rules))
            entry.rules.append(rule)
            order.append(rule)
            labels_path = (row.get("labels_path") or "").strip()
            if labels_path:
                entry.labels.update(_read_labels(path.parent / labels_path))
        catalog = cls()
        for entry in entries.values():
            if entry.kind not in ORIGIN_KINDS:
                raise ValueError(f"{path}: unknown origin kind {entry.kind!r} for {entry.source_id}")
            catalog.entries[entry.source_id] = entry
        catalog._rules = order
        return catalog

    @classmethod
    def starter(cls) -> "OriginCatalog":
        """The bundled catalog of common biomedical namespaces."""
        with resources.as_file(resources.files("lodscope") / "data" / "catalog" / "starter.tsv") as p:
            return cls.load(p)

    def match(self, uri: str) -> Optional[OriginMatch]:
        lowered = uri.lower()
        for rule in self._rules:
            m = rule.namespace.match(lowered)
            if not m:
                continue
            entry = self.entries[rule.source_id]
            # lowercasing can change the length of non-ASCII text
            rest = uri[m.end():] if len(lowered) == len(uri) else lowered[m.end():]
            namespace = uri[:m.end()] if len(lowered) == len(uri) else lowered[:m.end()]
            identifier = None
            if rule.identifier is not None:
                im = rule.identifier.fullmatch(rest.lower())
                if im:
                    span = im.span(1) if im.re.groups else im.span(0)
                    identifier = rest[span[0]:span[1]]
            return OriginMatch(Origin(entry.source_id, entry.kind), namespace, identifier, rule.position)
        return None

    def classify(self, uri: str) -> Origin:
        m = self.match(uri)
        return m.origin if m else UNKNOWN

    def label_for(self, uri: str) -> Optional[str]:
        origin = self.classify(uri)
        if origin.known:
            label = self.entries[origin.source_id].labels.get(uri)
            if label:
                return label
        for entry in self.entries.values():
            if entry.labels.get(uri):
                return entry.labels[uri]
        return None


def _read_labels(path: Path) -> dict[str, str]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            iri, _, label = line.rstrip("\n").partition("\t")
            if iri and label and iri != "iri":
                labels[iri] = label.strip()
    return labels


def classify_origin(uri: str, catalog: OriginCatalog) -> Origin:
    return catalog.classify(uri)


# -- labels --------------------------------------------------------------------

@dataclass(frozen=True)
class LabeledUri:
    uri: str
    label: str
    method: str
    source: Optional[str] = None

    def __post_init__(self):
        if not self.label:
            raise ValueError("label must be non-empty")
        if self.method not in LABEL_METHODS:
            raise ValueError(f"unknown label method {self.method!r}")


_SEPARATORS = re.compile(r"[-_\s.]+")
_CAMEL = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+|[^A-Za-z\d]+")


def split_words(text: str) -> list[str]:
    """Split on '-', '_', whitespace and camel-case boundaries."""
    words = []
    for chunk in _SEPARATORS.split(text):
        words.extend(w for w in _CAMEL.findall(chunk) if w)
    return words


def label_from_local_name(text: str) -> str:
    return " ".join(w[:1].upper() + w[1:].lower() for w in split_words(text))


def _endpoint_label(uri: str, endpoint: "EndpointDescriptor", client: "SparqlClient") -> Optional[str]:
    from .errors import SparqlError

    try:
        result = client.execute(endpoint, templates.render("LABEL", {"TERM_URI": uri}))
    except (SparqlError, ValueError) as exc:
        logger.info("label lookup for %s failed: %s", uri, exc)
        return None
    candidates = [t for t in result.column("label") if isinstance(t, Literal) and t.value.strip()]
    if not candidates:
        return None
    # untagged or English labels first, then the lexicographically smallest
    best = min(candidates, key=lambda t: (t.lang not in (None, "", "en"), t.value))
    return best.value.strip()


def extract_label(uri: str, catalog: OriginCatalog | None = None,
                  endpoint: "EndpointDescriptor | None" = None, *,
                  client: "SparqlClient | None" = None, source: str | None = None) -> LabeledUri:
    """Label a URI: catalog map, then endpoint annotation, then its local name."""
    if catalog is not None:
        label = catalog.label_for(uri)
        if label:
            return LabeledUri(uri, label, "catalog_annotation", source)
    if endpoint is not None:
        if client is None:
            from .sparql.client import SparqlClient

            client = SparqlClient()
        label = _endpoint_label(uri, endpoint, client)
        if label:
            return LabeledUri(uri, label, "endpoint_annotation", source)
    label = label_from_local_name(local_name(uri))
    return LabeledUri(uri, label or uri, "regexp", source)


# -- namespace variants ------------------------------------------------------------

@dataclass(frozen=True)
class VariantGroup:
    origin: str
    identifier: str
    uris: tuple[str, ...]
    namespaces: tuple[str, ...]
    recommended_namespace: Optional[str]  # present in the group, if any


def detect_uri_variants(uris: Iterable[str], catalog: OriginCatalog) -> list[VariantGroup]:
    """Group URIs sharing (origin, identifier) but written with different namespaces."""
    buckets: dict[tuple[str, str], dict[str, OriginMatch]] = defaultdict(dict)
    for uri in set(uris):
        m = catalog.match(uri)
        if m is None or m.identifier is None:
            continue
        buckets[(m.origin.source_id, m.identifier.lower())][uri] = m
    groups = []
    for (origin, ident), members in sorted(buckets.items()):
        namespaces = sorted({m.namespace for m in members.values()})
        if len(namespaces) < 2:
            continue
        recommended = sorted(m.namespace for m in members.values() if m.rule_position == 0)
        groups.append(VariantGroup(origin, ident, tuple(sorted(members)), tuple(namespaces),
                                   recommended[0] if recommended else None))
    return groups


def write_variant_groups(groups: list[VariantGroup], path: str | Path) -> Path:
    return write_tsv(path, ["origin", "identifier", "variant_uris", "recommended_namespace"],
                     [(g.origin, g.identifier, " ".join(g.uris), g.recommended_namespace or "")
                      for g in groups])


# -- semantic mismatch ---------------------------------------------------------------

class MismatchRecord(NamedTuple):
    source: str
    ontology: str
    count: int


def detect_semantic_mismatch(graph: "LslodSchemaGraph", catalog: OriginCatalog,
                             threshold: int = MISMATCH_THRESHOLD) -> list[MismatchRecord]:
    """Sources that treat ontology classes as if they were instances.

    A record is emitted when a source has more than ``threshold`` class nodes
    from one catalog ontology (count = those classes), or when sampled
    instances of its classes live in an ontology's namespace (count = the
    number of classes with such instances).
    """
    typing: dict[tuple[str, str], int] = Counter()
    patterned: dict[tuple[str, str], int] = Counter()
    for node in graph.nodes.values():
        origin = catalog.classify(node.uri)
        for src, kind in node.kinds.items():
            if kind != "class":
                continue
            if origin.kind in ONTOLOGY_KINDS:
                typing[(src, origin.source_id)] += 1
            summary = node.summaries.get(src)
            hits = set()
            # URI patterns keep the local-name prefix (CHEBI_\d+), which the
            # bare namespace (.../obo/) would lose
            for pattern in (summary.uri_patterns if summary else {}):
                pattern_origin = catalog.classify(pattern)
                if pattern_origin.kind in ONTOLOGY_KINDS:
                    hits.add(pattern_origin.source_id)
            for onto in hits:
                patterned[(src, onto)] += 1
    records = []
    for key in sorted(set(typing) | set(patterned)):
        if typing[key] > threshold:
            records.append(MismatchRecord(*key, typing[key]))
        elif patterned[key]:
            records.append(MismatchRecord(*key, patterned[key]))
    return records


def write_mismatch(records: list[MismatchRecord], path: str | Path) -> Path:
    return write_tsv(path, ["source", "ontology", "count"], records)


__all__ = [
    "CatalogEntry", "LabeledUri", "MismatchRecord", "NamespaceRule", "Origin", "OriginCatalog",
    "OriginMatch", "UNKNOWN", "VariantGroup", "classify_origin", "detect_semantic_mismatch",
    "detect_uri_variants", "extract_label", "label_from_local_name", "split_words",
    "write_mismatch", "write_variant_groups",
]

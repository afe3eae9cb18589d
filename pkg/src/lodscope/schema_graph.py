"""The merged schema graph: classes, properties and datatypes across sources."""

from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union
from urllib.parse import urlparse

import networkx as nx

from .extract import PropertyRealization, SchemaFragment, ValueSummary, summarize
from .io import atomic_write_json, graphml_text, atomic_write_text, write_tsv
from .sparql.terms import RDF, RDFS, XSD

KINDS = ("class", "object_property", "data_property", "datatype")
_KIND_RANK = {k: i for i, k in enumerate(KINDS)}
STANDARD_DATATYPE_NAMESPACES = (XSD, RDFS, RDF)
FORMAT = "lodscope-schema-graph"
FORMAT_VERSION = 1


# -- graph URI normalisation ---------------------------------------------------

Rule = tuple[re.Pattern, str]


def load_rules(path: str | Path) -> list[Rule]:
    """Read ``regex<TAB>source_id`` lines; ``#`` starts a comment."""
    rules = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            pattern, _, source = line.partition("\t")
            if not source.strip():
                raise ValueError(f"rule without source id: {line!r}")
            rules.append((re.compile(pattern.strip()), source.strip()))
    return rules


def normalize_graph_uri(graph_uri: str, rules: Iterable[Union[Rule, tuple[str, str]]] = ()) -> str:
    """Map a graph IRI to a source id; first matching rule wins.

    Without a match the id is the host plus the first path segment.
    """
    for pattern, source in rules:
        rx = re.compile(pattern) if isinstance(pattern, str) else pattern
        if rx.search(graph_uri):
            return source
    parsed = urlparse(graph_uri)
    segment = parsed.path.strip("/").split("/")[0] if parsed.path.strip("/") else ""
    host = parsed.netloc or parsed.scheme
    return f"{host}/{segment}" if segment else host or graph_uri


# -- model ---------------------------------------------------------------------

@dataclass
class SchemaNode:
    uri: str
    kinds: dict[str, str] = field(default_factory=dict)       # source -> kind
    counts: dict[str, int] = field(default_factory=dict)      # source -> count
    summaries: dict[str, ValueSummary] = field(default_factory=dict)
    nonstandard: bool = False

    @property
    def sources(self) -> set[str]:
        return set(self.kinds)

    def kind_set(self) -> set[str]:
        return set(self.kinds.values())

    def total_count(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class SchemaEdge:
    frm: str
    to: str
    role: str  # "domain" | "range"
    source: str
    count: int
    summary: ValueSummary = field(compare=False, hash=False, default_factory=ValueSummary)


@dataclass
class SourceInfo:
    endpoints: set[str] = field(default_factory=set)
    graphs: set[str] = field(default_factory=set)


def _canonical(fragment: SchemaFragment) -> SchemaFragment:
    frag = SchemaFragment.from_dict(fragment.to_dict())
    frag.classes.sort(key=lambda c: c.uri)
    return frag


@dataclass
class LslodSchemaGraph:
    """Merged schema graph.

    The per-(source, graph) fragments are the ground truth; nodes and edges
    are derived from them, which makes merging order-independent and
    idempotent.
    """

    fragments: dict[tuple[str, str], SchemaFragment] = field(default_factory=dict)
    sources: dict[str, SourceInfo] = field(default_factory=dict)

    def __post_init__(self):
        self._derived = None

    def __eq__(self, other):
        if not isinstance(other, LslodSchemaGraph):
            return NotImplemented
        return self.fragments == other.fragments and self.sources == other.sources

    # derived views
    @property
    def nodes(self) -> dict[str, SchemaNode]:
        return self._derive()[0]

    @property
    def edges(self) -> list[SchemaEdge]:
        return self._derive()[1]

    def realizations(self, source: str | None = None) -> list[tuple[str, str, PropertyRealization]]:
        """(source, graph, realization) triples in deterministic order."""
        out = []
        for (src, g) in sorted(self.fragments):
            if source is not None and src != source:
                continue
            out.extend((src, g, r) for r in self.fragments[(src, g)].property_realizations)
        return out

    def class_profiles(self, source: str | None = None):
        out = []
        for (src, g) in sorted(self.fragments):
            if source is not None and src != source:
                continue
            out.extend((src, g, c) for c in self.fragments[(src, g)].classes)
        return out

    def source_ids(self) -> list[str]:
        return sorted(self.sources)

    def _derive(self):
        if self._derived is not None:
            return self._derived
        kinds: dict[str, dict[str, str]] = defaultdict(dict)
        counts: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
        samples: dict[tuple[str, str], list] = defaultdict(list)
        edge_counts: dict[tuple, int] = defaultdict(int)
        edge_samples: dict[tuple, list] = defaultdict(list)
        seen_pair_samples: set = set()

        def mark(uri, source, kind):
            current = kinds[uri].get(source)
            if current is None or _KIND_RANK[kind] < _KIND_RANK[current]:
                kinds[uri][source] = kind

        for (src, g) in sorted(self.fragments):
            frag = self.fragments[(src, g)]
            for c in frag.classes:
                mark(c.uri, src, "class")
                counts[c.uri][src] += c.count
                samples[(c.uri, src)].extend(c.sample)
            for r in frag.property_realizations:
                pkind = "object_property" if r.kind == "object" else "data_property"
                mark(r.property, src, pkind)
                counts[r.property][src] += r.count
                pair = (src, g, r.domain, r.property)
                first_time = pair not in seen_pair_samples
                seen_pair_samples.add(pair)
                if first_time:
                    samples[(r.property, src)].extend(r.sample)
                dkey = (r.domain, r.property, "domain", src)
                edge_counts[dkey] += r.count
                if first_time:
                    edge_samples[dkey].extend(r.sample)
                if r.range and r.range != "anonymous":
                    rkind = "class" if r.kind == "object" else "datatype"
                    mark(r.range, src, rkind)
                    if rkind == "datatype":
                        counts[r.range][src] += r.count
                    rkey = (r.property, r.range, "range", src)
                    edge_counts[rkey] += r.count
                    edge_samples[rkey].extend(r.sample)
        nodes = {}
        for uri in sorted(kinds):
            node = SchemaNode(uri, dict(sorted(kinds[uri].items())))
            for src in node.kinds:
                node.counts[src] = counts[uri].get(src, 0)
                node.summaries[src] = summarize(samples.get((uri, src), []))
            node.nonstandard = ("datatype" in node.kind_set()
                                and not uri.startswith(STANDARD_DATATYPE_NAMESPACES))
            nodes[uri] = node
        edges = [SchemaEdge(f, t, role, src, edge_counts[(f, t, role, src)],
                            summarize(edge_samples[(f, t, role, src)]))
                 for (f, t, role, src) in sorted(edge_counts)]
        self._derived = (nodes, edges)
        return self._derived

    # -- serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "version": FORMAT_VERSION,
            "sources": {
                sid: {"endpoints": sorted(info.endpoints), "graphs": sorted(info.graphs)}
                for sid, info in sorted(self.sources.items())
            },
            "fragments": [
                {"source": src, "fragment": self.fragments[(src, g)].to_dict(src)}
                for (src, g) in sorted(self.fragments)
            ],
            "nodes": [
                {"uri": n.uri, "kinds": n.kinds, "counts": n.counts, "nonstandard": n.nonstandard,
                 "summaries": {s: v.to_dict() for s, v in n.summaries.items()}}
                for n in self.nodes.values()
            ],
            "edges": [
                {"from": e.frm, "to": e.to, "role": e.role, "source": e.source,
                 "count": e.count, "summary": e.summary.to_dict()}
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LslodSchemaGraph":
        if doc.get("format") != FORMAT:
            raise ValueError("not a schema graph document")
        if doc.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported schema graph version {doc.get('version')}")
        graph = cls()
        for sid, info in doc["sources"].items():
            graph.sources[sid] = SourceInfo(set(info["endpoints"]), set(info["graphs"]))
        for item in doc["fragments"]:
            frag = SchemaFragment.from_dict(item["fragment"])
            graph.fragments[(item["source"], frag.graph_uri)] = frag
        return graph

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "LslodSchemaGraph":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> Path:
        return atomic_write_text(path, self.serialize())

    @classmethod
    def load(cls, path: str | Path) -> "LslodSchemaGraph":
        return cls.deserialize(Path(path).read_text(encoding="utf-8"))


MergeItem = Union[LslodSchemaGraph, tuple]


def merge(*items: MergeItem) -> LslodSchemaGraph:
    """Union fragments and graphs into a new schema graph.

    Items are graphs, ``(source, fragment)`` or ``(source, fragment,
    endpoint_id)`` tuples; a single iterable of such items is accepted too.
    The same (source, graph IRI) seen twice keeps one copy, chosen by
    content so that argument order never matters.
    """
    if len(items) == 1 and not isinstance(items[0], (LslodSchemaGraph, tuple)):
        items = tuple(items[0])
    out = LslodSchemaGraph()

    def put(src, frag, endpoints):
        frag = _canonical(frag)
        key = (src, frag.graph_uri)
        old = out.fragments.get(key)
        if old is not None and old != frag:
            a = json.dumps(old.to_dict(src), sort_keys=True)
            b = json.dumps(frag.to_dict(src), sort_keys=True)
            frag = old if a >= b else frag
        out.fragments[key] = frag
        info = out.sources.setdefault(src, SourceInfo())
        info.graphs.add(frag.graph_uri)
        info.endpoints |= set(endpoints)

    for item in items:
        if isinstance(item, LslodSchemaGraph):
            for (src, _), frag in item.fragments.items():
                put(src, frag, ())
            for src, info in item.sources.items():
                merged = out.sources.setdefault(src, SourceInfo())
                merged.endpoints |= info.endpoints
                merged.graphs |= info.graphs
        else:
            src, frag, *rest = item
            put(src, frag, [rest[0]] if rest and rest[0] else [])
    return out


# -- statistics ------------------------------------------------------------------

@dataclass
class GraphStats:
    per_source: dict[str, dict[str, int]]
    total: dict[str, int]
    overlap: list[tuple[str, tuple[str, ...]]]

    def rows(self) -> list[tuple]:
        rows = [(s, *(self.per_source[s][k] for k in KINDS)) for s in sorted(self.per_source)]
        rows.append(("TOTAL", *(self.total[k] for k in KINDS)))
        return rows


def stats(graph: LslodSchemaGraph) -> GraphStats:
    per_source = {s: {k: 0 for k in KINDS} for s in graph.sources}
    total = {k: 0 for k in KINDS}
    overlap = []
    for node in graph.nodes.values():
        for src, kind in node.kinds.items():
            per_source.setdefault(src, {k: 0 for k in KINDS})[kind] += 1
        for kind in node.kind_set():
            total[kind] += 1
        if len(node.kind_set()) > 1:
            overlap.append((node.uri, tuple(sorted(node.kind_set(), key=_KIND_RANK.get))))
    return GraphStats(per_source, total, overlap)


# -- exports -----------------------------------------------------------------------

def _per_source(d: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(d.items()))


def export_tsv(graph: LslodSchemaGraph, directory: str | Path) -> list[Path]:
    """Write classes/object_properties/data_properties/datatypes TSVs and stats."""
    directory = Path(directory)
    by_kind: dict[str, list[SchemaNode]] = {k: [] for k in KINDS}
    for node in graph.nodes.values():
        for kind in sorted(node.kind_set(), key=_KIND_RANK.get):
            by_kind[kind].append(node)
    domains, ranges = defaultdict(set), defaultdict(set)
    for e in graph.edges:
        (domains if e.role == "domain" else ranges)[e.to if e.role == "domain" else e.frm].add(
            e.frm if e.role == "domain" else e.to)
    paths = []
    header = ["uri", "sources", "total_count", "per_source_counts"]
    for kind, fname in (("class", "classes.tsv"), ("datatype", "datatypes.tsv")):
        rows = []
        for n in by_kind[kind]:
            srcs = [s for s, k in n.kinds.items() if k == kind]
            row = [n.uri, ",".join(srcs), sum(n.counts[s] for s in srcs),
                   _per_source({s: n.counts[s] for s in srcs})]
            if kind == "datatype":
                row.append("yes" if n.nonstandard else "no")
            rows.append(row)
        paths.append(write_tsv(directory / fname, header + (["nonstandard"] if kind == "datatype" else []), rows))
    for kind, fname in (("object_property", "object_properties.tsv"), ("data_property", "data_properties.tsv")):
        rows = []
        for n in by_kind[kind]:
            srcs = [s for s, k in n.kinds.items() if k == kind]
            rows.append([n.uri, ",".join(srcs), sum(n.counts[s] for s in srcs),
                         _per_source({s: n.counts[s] for s in srcs}),
                         ",".join(sorted(domains[n.uri])), ",".join(sorted(ranges[n.uri]))])
        paths.append(write_tsv(directory / fname, header + ["domains", "ranges"], rows))
    st = stats(graph)
    paths.append(write_tsv(directory / "stats.tsv", ["source", *KINDS], st.rows()))
    paths.append(write_tsv(directory / "overlap.tsv", ["uri", "kinds"],
                           [(u, ",".join(k)) for u, k in st.overlap]))
    return paths


def to_networkx(graph: LslodSchemaGraph) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    for n in graph.nodes.values():
        g.add_node(n.uri, kind=",".join(sorted(n.kind_set(), key=_KIND_RANK.get)),
                   sources=",".join(sorted(n.sources)), count=n.total_count(),
                   nonstandard=n.nonstandard)
    for e in graph.edges:
        g.add_edge(e.frm, e.to, role=e.role, source=e.source, count=e.count)
    return g


def export_graphml(graph: LslodSchemaGraph, path: str | Path) -> Path:
    return atomic_write_text(path, graphml_text(to_networkx(graph)))

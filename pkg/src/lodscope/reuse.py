"""Vocabulary reuse across sources and the inter/intra-linking network.

The reuse network has one node per source-scoped schema element (a class or
property URI as used by one source).  Occurrences of the same URI in two
sources are joined by a reuse edge; URIs that are namespace variants of the
same catalog term are joined by a mapping edge.  The reuse statistic is the
share of nodes that a multi-element component "absorbs":
``(sum of sizes of components with >= 2 nodes - their number) / N``.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Optional

import networkx as nx

from .errors import DegenerateNetwork
from .extract import namespace_of
from .io import atomic_write_text, graphml_text, write_tsv
from .schema_graph import LslodSchemaGraph
from .sparql.terms import IRI
from .uris import ONTOLOGY_KINDS, OriginCatalog, VariantGroup, detect_uri_variants

SCHEMA_KINDS = ("class", "object_property", "data_property")
PATTERN_PREFIX = "pattern:"


# -- union-find ------------------------------------------------------------------

class UnionFind:
    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.size[item] = 1

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:  # path compression
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list]:
        out: dict = defaultdict(list)
        for item in self.parent:
            out[self.find(item)].append(item)
        return [sorted(g, key=repr) for g in out.values()]


# -- reuse network -------------------------------------------------------------------

@dataclass
class ReuseNetwork:
    """Undirected graph over hashable node ids (``(source, uri)`` pairs when built
    from a schema graph)."""

    nodes: list = field(default_factory=list)
    edges: set[frozenset] = field(default_factory=set)

    def __post_init__(self):
        self.nodes = sorted(set(self.nodes), key=repr)
        known = set(self.nodes)
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"self-edge or malformed edge {set(e)}")
            if not e <= known:
                raise ValueError(f"edge {set(e)} references unknown nodes")

    @property
    def N(self) -> int:
        return len(self.nodes)

    def add_edge(self, a, b) -> None:
        if a == b:
            raise ValueError("self-edges are not allowed")
        self.edges.add(frozenset((a, b)))

    def components(self) -> list[list]:
        uf = UnionFind(self.nodes)
        for e in self.edges:
            a, b = tuple(e)
            uf.union(a, b)
        return sorted(uf.groups(), key=lambda g: (-len(g), repr(g[0])))


def build_reuse_network(graph: LslodSchemaGraph, catalog: OriginCatalog | None = None,
                        variant_groups: Iterable[VariantGroup] | None = None) -> ReuseNetwork:
    catalog = catalog or OriginCatalog()
    occurrences: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for node in graph.nodes.values():
        for src, kind in node.kinds.items():
            if kind in SCHEMA_KINDS:
                occurrences[node.uri].append((src, node.uri))
    net = ReuseNetwork([occ for occs in occurrences.values() for occ in occs])

    # identical URI used by several sources
    for occs in occurrences.values():
        for a, b in zip(occs, occs[1:]):
            net.add_edge(a, b)

    # namespace variants of one catalog term
    if variant_groups is None:
        variant_groups = detect_uri_variants(occurrences, catalog)
    for group in variant_groups:
        members = [occ for uri in group.uris for occ in occurrences.get(uri, ())]
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if a[0] != b[0]:
                    net.add_edge(a, b)

    # instance URI patterns living in an ontology namespace
    pattern_nodes: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for node in graph.nodes.values():
        for src, kind in node.kinds.items():
            summary = node.summaries.get(src)
            if kind != "class" or summary is None:
                continue
            for pattern in summary.uri_patterns:
                if catalog.classify(pattern).kind in ONTOLOGY_KINDS:
                    occ = (src, PATTERN_PREFIX + pattern)
                    if occ not in pattern_nodes[pattern]:
                        pattern_nodes[pattern].append(occ)
    if pattern_nodes:
        net = ReuseNetwork(net.nodes + [o for occs in pattern_nodes.values() for o in occs], net.edges)
        class_occs = [occ for occs in occurrences.values() for occ in occs
                      if graph.nodes[occ[1]].kinds.get(occ[0]) == "class"]
        for pattern, occs in sorted(pattern_nodes.items()):
            for a, b in zip(occs, occs[1:]):
                net.add_edge(a, b)
            rx = pattern_regex(pattern)
            for cls_occ in class_occs:
                if rx.fullmatch(cls_occ[1]):
                    for occ in occs:
                        net.add_edge(occ, cls_occ)
    return net


_PLACEHOLDER = re.compile(r"(\\d\+|\[a-z\]\+)")


def pattern_regex(pattern: str) -> re.Pattern:
    """Compile a ValueSummary URI pattern into a regex (namespace taken literally)."""
    ns = namespace_of(pattern)
    parts = _PLACEHOLDER.split(pattern[len(ns):])
    body = "".join(p if i % 2 else re.escape(p) for i, p in enumerate(parts))
    return re.compile(re.escape(ns) + body)


def reuse_statistic(network: ReuseNetwork) -> float:
    if network.N == 0:
        raise DegenerateNetwork("reuse network has no nodes")
    multi = [c for c in network.components() if len(c) >= 2]
    return (sum(len(c) for c in multi) - len(multi)) / network.N


def write_components(network: ReuseNetwork, path: str | Path) -> Path:
    def label(node):
        return f"{node[0]}|{node[1]}" if isinstance(node, tuple) else str(node)

    rows = [(i, len(c), " ".join(label(n) for n in c)) for i, c in enumerate(network.components())]
    return write_tsv(path, ["component_id", "size", "members"], rows)


# -- ownership of URIs ---------------------------------------------------------------

@dataclass
class Ownership:
    """Decides which source (or catalog origin) a URI belongs to.

    A catalog match naming one of the graph's sources wins; otherwise the
    namespace is assigned to the source whose class instances use it most
    (ties broken by source id); otherwise any catalog origin is used.
    """

    graph: LslodSchemaGraph
    catalog: OriginCatalog
    namespace_home: dict[str, str] = field(init=False)

    def __post_init__(self):
        usage: dict[str, Counter] = defaultdict(Counter)
        for node in self.graph.nodes.values():
            for src, kind in node.kinds.items():
                summary = node.summaries.get(src)
                if kind == "class" and summary is not None:
                    for ns, n in summary.namespaces.items():
                        usage[ns][src] += n
        self.namespace_home = {
            ns: min(c, key=lambda s: (-c[s], s)) for ns, c in usage.items()
        }

    def owner(self, uri: str) -> Optional[str]:
        m = self.catalog.match(uri)
        if m is not None and m.origin.source_id in self.graph.sources:
            return m.origin.source_id
        home = self.namespace_home.get(namespace_of(uri))
        if home is not None:
            return home
        return m.origin.source_id if m is not None else None

    def source_owner(self, uri: str) -> Optional[str]:
        """Owner restricted to the graph's own sources."""
        owner = self.owner(uri)
        return owner if owner in self.graph.sources else None


# -- per-source statistics --------------------------------------------------------------

@dataclass
class SourceStats:
    source: str
    vocabularies: list[str]
    schema_elements: int
    reused_elements: int
    interlink: dict[str, float]   # class -> share of sampled object IRIs owned elsewhere
    intralink: dict[str, float]   # class -> share owned by this source
    entities: int
    external_entities: int

    @property
    def n_vocabularies(self) -> int:
        return len(self.vocabularies)

    @staticmethod
    def _pct(num, den) -> float:
        return 100.0 * num / den if den else 0.0

    @property
    def pct_reused(self) -> float:
        return self._pct(self.reused_elements, self.schema_elements)

    @property
    def pct_interlinked_classes(self) -> float:
        return self._pct(sum(1 for v in self.interlink.values() if v > 0), len(self.interlink))

    @property
    def pct_intralinked_classes(self) -> float:
        return self._pct(sum(1 for v in self.intralink.values() if v > 0), len(self.intralink))

    @property
    def pct_external_entities(self) -> float:
        return self._pct(self.external_entities, self.entities)


def _class_object_samples(graph: LslodSchemaGraph, source: str) -> dict[str, list[str]]:
    samples: dict[str, list[str]] = defaultdict(list)
    seen = set()
    for src, g, r in graph.realizations(source):
        key = (g, r.domain, r.property)
        if r.kind != "object" or key in seen:
            continue
        seen.add(key)
        samples[r.domain].extend(t.value for t in r.sample if isinstance(t, IRI))
    return samples


def source_statistics(graph: LslodSchemaGraph, catalog: OriginCatalog | None = None) -> dict[str, SourceStats]:
    catalog = catalog or OriginCatalog()
    own = Ownership(graph, catalog)
    out = {}
    for source in graph.source_ids():
        vocabularies, elements, reused = set(), 0, 0
        classes = []
        for node in graph.nodes.values():
            kind = node.kinds.get(source)
            if kind not in SCHEMA_KINDS:
                continue
            elements += 1
            if kind == "class":
                classes.append(node.uri)
            origin = catalog.classify(node.uri)
            if origin.known and origin.kind != "ld_source":
                vocabularies.add(origin.source_id)
            owner = own.owner(node.uri)
            if owner is not None and owner != source:
                reused += 1
        objects = _class_object_samples(graph, source)
        interlink, intralink = {}, {}
        for cls in sorted(classes):
            values = objects.get(cls, [])
            owners = [own.owner(v) for v in values]
            n = len(values)
            interlink[cls] = sum(1 for o in owners if o is not None and o != source) / n if n else 0.0
            intralink[cls] = sum(1 for o in owners if o == source) / n if n else 0.0
        entities = external = 0
        for _, _, profile in graph.class_profiles(source):
            for t in profile.sample:
                if isinstance(t, IRI):
                    entities += 1
                    owner = own.owner(t.value)
                    external += owner is not None and owner != source
        out[source] = SourceStats(source, sorted(vocabularies), elements, reused,
                                  interlink, intralink, entities, external)
    return out


def write_source_statistics(stats: dict[str, SourceStats], path: str | Path) -> Path:
    def dist(d: dict[str, float]) -> str:
        return ";".join(f"{k}={v:.4f}" for k, v in sorted(d.items()) if v > 0)

    rows = [(s.source, s.n_vocabularies, ",".join(s.vocabularies), f"{s.pct_reused:.2f}",
             f"{s.pct_interlinked_classes:.2f}", dist(s.interlink),
             f"{s.pct_intralinked_classes:.2f}", dist(s.intralink),
             f"{s.pct_external_entities:.2f}")
            for s in (stats[k] for k in sorted(stats))]
    return write_tsv(path, ["source", "n_vocabularies", "vocabularies", "pct_reused_elements",
                            "pct_interlinked_classes", "interlink_distribution",
                            "pct_intralinked_classes", "intralink_distribution",
                            "pct_external_entities"], rows)


# -- link network ----------------------------------------------------------------------

@dataclass
class LinkNetwork:
    intra: dict[str, int]
    inter: dict[tuple[str, str], int]  # keys are sorted source pairs

    def weight(self, a: str, b: str) -> int:
        return self.inter.get(tuple(sorted((a, b))), 0)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for s in sorted(self.intra):
            g.add_node(s, size=self.intra[s])
        for (a, b), w in sorted(self.inter.items()):
            g.add_edge(a, b, weight=w)
        return g


def build_link_network(graph: LslodSchemaGraph, catalog: OriginCatalog | None = None) -> LinkNetwork:
    """Count distinct object properties linking classes within and across sources.

    A realization's targets come from its range class when typed, otherwise
    from the owners of its sampled object IRIs.
    """
    own = Ownership(graph, catalog or OriginCatalog())
    intra_props: dict[str, set[str]] = {s: set() for s in graph.sources}
    inter_props: dict[tuple[str, str], set[str]] = defaultdict(set)
    for src, _, r in graph.realizations():
        if r.kind != "object":
            continue
        if r.range and r.range != "anonymous":
            node = graph.nodes.get(r.range)
            if node is not None and node.kinds.get(src) == "class":
                targets = {src}
            else:
                targets = {own.source_owner(r.range)} - {None}
        else:
            targets = {own.source_owner(t.value) for t in r.sample if isinstance(t, IRI)} - {None}
        for tgt in targets:
            if tgt == src:
                intra_props[src].add(r.property)
            else:
                inter_props[tuple(sorted((src, tgt)))].add(r.property)
    return LinkNetwork({s: len(p) for s, p in sorted(intra_props.items())},
                       {k: len(v) for k, v in sorted(inter_props.items())})


def export_link_network(network: LinkNetwork, path: str | Path) -> Path:
    return atomic_write_text(path, graphml_text(network.to_networkx()))

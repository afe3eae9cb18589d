"""Pipeline steps behind the CLI subcommands.

Every step reads its inputs from the output directory (or the endpoints),
writes its artifacts atomically, and returns the paths it wrote.  Output
layout::

    capabilities.tsv
    fragments/<endpoint>.json
    schema/schema_graph.json, schema_graph.graphml, stats.tsv, overlap.tsv,
           classes.tsv, object_properties.tsv, data_properties.tsv, datatypes.tsv
    reuse/summary.tsv, source_statistics.tsv, components.tsv, link_network.graphml,
          link_network.tsv, variant_groups.tsv, mismatch.tsv
    communities/labels.tsv, similarity.graphml, communities.graphml,
                communities.tsv, membership.tsv, modularity.tsv
    report.txt
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from types import SimpleNamespace

from . import community, embedding, reuse, schema_graph, uris
from .config import RunConfig, running_endpoints
from .errors import ConfigError, LodscopeError
from .extract import Extractor, extract_many, fragments_from_document, fragments_to_document
from .io import atomic_write_json, atomic_write_text, read_tsv, write_tsv
from .sparql.client import SparqlClient
from .sparql.terms import IRI

logger = logging.getLogger(__name__)


def _rules(config: RunConfig):
    return schema_graph.load_rules(config.graph_rules) if config.graph_rules else []


def _catalog(config: RunConfig) -> uris.OriginCatalog:
    return uris.OriginCatalog.load(config.catalog) if config.catalog else uris.OriginCatalog.starter()


def _require(path: Path, step: str) -> Path:
    if not path.exists():
        raise ConfigError(f"{path} not found; run `{step}` first")
    return path


def probe(config: RunConfig) -> list[Path]:
    out = config.check_output_dir()
    client = SparqlClient()
    rows = []
    with running_endpoints(config) as descriptors:
        for ep in config.endpoints:
            cap = client.detect_capabilities(descriptors[ep.id])
            rows.append((ep.id, ep.location, cap.version, cap.supports_group_by, cap.supports_bind,
                         cap.supports_order_by_rand, cap.supports_named_graphs))
    yes = {True: "true", False: "false"}
    path = write_tsv(out / "capabilities.tsv",
                     ["endpoint", "location", "version", "group_by", "bind", "order_by_rand", "named_graphs"],
                     [(*r[:3], *(yes[b] for b in r[3:])) for r in rows])
    return [path]


def extract(config: RunConfig) -> list[Path]:
    out = config.check_output_dir()
    rules = _rules(config)
    client = SparqlClient()
    extractor = Extractor(client, config.sample_n, config.seed, config.class_cap)
    written, failures = [], []
    with running_endpoints(config) as descriptors:
        probed = {}
        for ep in config.endpoints:
            try:
                probed[ep.id] = client.probe(descriptors[ep.id])
            except LodscopeError as exc:
                failures.append((ep.id, exc))
        results = {d.id: (d, res) for d, res in extract_many(list(probed.values()), extractor, config.workers)}
    for ep in config.endpoints:
        if ep.id not in results:
            continue
        descriptor, res = results[ep.id]
        if isinstance(res, Exception):
            failures.append((ep.id, res))
            continue
        sources = {g: schema_graph.normalize_graph_uri(g, rules) for g in res}
        # record the stable location rather than a possibly ephemeral fixture port
        stable = SimpleNamespace(id=ep.id, url=ep.location, capability=descriptor.capability)
        doc = fragments_to_document(stable, res, sources)
        written.append(atomic_write_json(out / "fragments" / f"{ep.id}.json", doc))
    for ep_id, exc in failures:
        logger.error("%s: extraction failed: %s", ep_id, exc)
    if failures:
        # fragments of the healthy endpoints stay on disk; the command still fails
        exc = failures[0][1]
        raise exc if isinstance(exc, LodscopeError) else LodscopeError(str(exc))
    return written


def merge(config: RunConfig) -> list[Path]:
    out = config.check_output_dir()
    rules = _rules(config)
    frag_dir = _require(out / "fragments", "extract")
    items = []
    for path in sorted(frag_dir.glob("*.json")):
        doc = json.loads(path.read_text(encoding="utf-8"))
        endpoint_id = doc["endpoint"]["id"]
        for graph_uri, fragment in sorted(fragments_from_document(doc).items()):
            items.append((schema_graph.normalize_graph_uri(graph_uri, rules), fragment, endpoint_id))
    if not items:
        raise ConfigError(f"no fragment files in {frag_dir}")
    graph = schema_graph.merge(*items)
    schema_dir = out / "schema"
    written = [graph.save(schema_dir / "schema_graph.json")]
    written += schema_graph.export_tsv(graph, schema_dir)
    written.append(schema_graph.export_graphml(graph, schema_dir / "schema_graph.graphml"))
    return written


def _load_graph(out: Path) -> schema_graph.LslodSchemaGraph:
    return schema_graph.LslodSchemaGraph.load(_require(out / "schema" / "schema_graph.json", "merge"))


def _sampled_iris(graph: schema_graph.LslodSchemaGraph) -> set[str]:
    found = set()
    for _, _, c in graph.class_profiles():
        found.update(t.value for t in c.sample if isinstance(t, IRI))
    for _, _, r in graph.realizations():
        found.update(t.value for t in r.sample if isinstance(t, IRI))
    return found


def reuse_step(config: RunConfig) -> list[Path]:
    out = config.check_output_dir()
    graph = _load_graph(out)
    catalog = _catalog(config)
    rdir = out / "reuse"
    network = reuse.build_reuse_network(graph, catalog)
    comps = network.components()
    multi = [c for c in comps if len(c) >= 2]
    value = reuse.reuse_statistic(network)
    written = [write_tsv(rdir / "summary.tsv", ["metric", "value"], [
        ("reuse_statistic", f"{value:.6f}"), ("nodes", network.N), ("edges", len(network.edges)),
        ("components", len(comps)), ("multi_element_components", len(multi)),
    ])]
    written.append(reuse.write_components(network, rdir / "components.tsv"))
    written.append(reuse.write_source_statistics(reuse.source_statistics(graph, catalog),
                                                 rdir / "source_statistics.tsv"))
    links = reuse.build_link_network(graph, catalog)
    written.append(reuse.export_link_network(links, rdir / "link_network.graphml"))
    written.append(write_tsv(rdir / "link_network.tsv", ["source_a", "source_b", "count"],
                             [(s, s, n) for s, n in sorted(links.intra.items())]
                             + [(a, b, n) for (a, b), n in sorted(links.inter.items())]))
    schema_uris = set(graph.nodes)
    groups = uris.detect_uri_variants(schema_uris | _sampled_iris(graph), catalog)
    written.append(uris.write_variant_groups(groups, rdir / "variant_groups.tsv"))
    written.append(uris.write_mismatch(uris.detect_semantic_mismatch(graph, catalog, config.mismatch_threshold),
                                       rdir / "mismatch.tsv"))
    return written


def labeled_elements(graph: schema_graph.LslodSchemaGraph, catalog: uris.OriginCatalog,
                     descriptors: dict | None = None) -> list[uris.LabeledUri]:
    """One label per schema-element URI, owned by its first source id."""
    client = SparqlClient() if descriptors else None
    labeled = []
    for node in graph.nodes.values():
        sources = sorted(s for s, k in node.kinds.items() if k != "datatype")
        if not sources:
            continue
        primary = sources[0]
        endpoint = None
        if descriptors:
            for ep_id in sorted(graph.sources[primary].endpoints):
                if ep_id in descriptors:
                    endpoint = descriptors[ep_id]
                    break
        labeled.append(uris.extract_label(node.uri, catalog, endpoint, client=client, source=primary))
    return labeled


def communities(config: RunConfig, use_endpoints: bool = True) -> list[Path]:
    out = config.check_output_dir()
    if not config.vectors:
        raise ConfigError("communities needs `vectors` (and usually `idf`) in [run]")
    graph = _load_graph(out)
    catalog = _catalog(config)
    table = embedding.load_embeddings(config.vectors, config.idf)
    if use_endpoints and config.endpoints:
        with running_endpoints(config) as descriptors:
            labeled = labeled_elements(graph, catalog, descriptors)
    else:
        labeled = labeled_elements(graph, catalog)
    cdir = out / "communities"
    written = [write_tsv(cdir / "labels.tsv", ["uri", "source", "label", "method"],
                         [(x.uri, x.source, x.label, x.method) for x in labeled])]
    network = embedding.build_similarity_network(labeled, table, config.similarity_threshold)
    assignment = community.louvain(network.uris(), network.weighted_edges(), config.seed,
                                   restarts=config.louvain_restarts)
    written.append(embedding.export_similarity_graphml(network, cdir / "similarity.graphml"))
    written.append(embedding.export_similarity_graphml(network, cdir / "communities.graphml",
                                                       assignment.membership))
    written.append(community.write_community_report(community.community_report(assignment, labeled),
                                                    cdir / "communities.tsv"))
    written.append(community.write_membership(assignment, labeled, cdir / "membership.tsv"))
    written.append(write_tsv(cdir / "modularity.tsv", ["metric", "value"], [
        ("modularity", f"{assignment.modularity:.9f}"), ("threshold", config.similarity_threshold),
        ("nodes", len(network.nodes)), ("edges", len(network.edges)),
        ("communities", len(assignment.communities())),
    ]))
    return written


def _table(rows: list[dict], columns: list[str]) -> str:
    widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in columns]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(columns, widths)) for r in rows]
    return "\n".join(lines)


def _variant_summary(rows: list[dict]) -> tuple[list[dict], list[str]]:
    by_origin: dict[str, dict] = {}
    for r in rows:
        agg = by_origin.setdefault(r["origin"], {"origin": r["origin"], "groups": 0, "uris": 0,
                                                 "with_recommended": 0})
        agg["groups"] += 1
        agg["uris"] += len(r["variant_uris"].split())
        agg["with_recommended"] += bool(r["recommended_namespace"])
    return [by_origin[o] for o in sorted(by_origin)], ["origin", "groups", "uris", "with_recommended"]


def report(config: RunConfig) -> list[Path]:
    """Summarise the artifacts already on disk; never touches an endpoint."""
    out = config.check_output_dir()
    parts = ["lodscope report", "==============="]
    sections = [
        ("Schema statistics", out / "schema" / "stats.tsv", None),
        ("Kind overlap", out / "schema" / "overlap.tsv", None),
        ("Vocabulary reuse", out / "reuse" / "summary.tsv", None),
        ("Per-source statistics", out / "reuse" / "source_statistics.tsv",
         ["source", "n_vocabularies", "pct_reused_elements", "pct_interlinked_classes",
          "pct_intralinked_classes", "pct_external_entities"]),
        ("Link network (same source = intra links)", out / "reuse" / "link_network.tsv", None),
        ("Namespace variants", out / "reuse" / "variant_groups.tsv", _variant_summary),
        ("Semantic mismatch", out / "reuse" / "mismatch.tsv", None),
        ("Similarity network", out / "communities" / "modularity.tsv", None),
        ("Communities", out / "communities" / "communities.tsv", None),
    ]
    found = 0
    for title, path, columns in sections:
        if not path.exists():
            continue
        found += 1
        rows = read_tsv(path)
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
        if callable(columns):
            rows, columns = columns(rows)
        parts += ["", title, "-" * len(title), _table(rows, columns or header) if rows else "(none)"]
    if not found:
        raise ConfigError(f"no artifacts found under {out}")
    return [atomic_write_text(out / "report.txt", "\n".join(parts) + "\n")]


STEPS = {
    "probe": probe,
    "extract": extract,
    "merge": merge,
    "reuse": reuse_step,
    "communities": communities,
    "report": report,
}


def run_all(config: RunConfig) -> list[Path]:
    written = []
    for name in ("probe", "extract", "merge", "reuse", "communities", "report"):
        written += STEPS[name](config)
    return written

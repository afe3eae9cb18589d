"""
Vocabulary reuse and URI variants
=================================

Build the reuse network of a small hand-made schema graph, compute the
reuse statistic, and group URIs that name the same entity under different
namespaces.
"""

# %%
# Three sources, each with one class. ``a`` and ``b`` both describe their
# class with ``dcterms:title``; ``c`` uses only its own vocabulary.
from lodscope import schema_graph
from lodscope.extract import ClassProfile, PropertyRealization, SchemaFragment
from lodscope.reuse import build_reuse_network, reuse_statistic, source_statistics
from lodscope.sparql.terms import XSD_STRING
from lodscope.uris import OriginCatalog, detect_uri_variants

TITLE = "http://purl.org/dc/terms/title"


def fragment(source: str, props: list[str]) -> SchemaFragment:
    cls = f"http://{source}.example.org/vocab/Thing"
    return SchemaFragment(f"http://{source}.example.org/graph",
                          [ClassProfile(cls, 10)],
                          [PropertyRealization(cls, p, "data", XSD_STRING, 10) for p in props])


graph = schema_graph.merge(
    ("a", fragment("a", [TITLE, "http://a.example.org/vocab/code"])),
    ("b", fragment("b", [TITLE])),
    ("c", fragment("c", ["http://c.example.org/vocab/name"])),
)

# %%
# Every (source, URI) occurrence is a node; occurrences of the same URI are
# chained together. The only multi-element component has two of the seven
# nodes, so the statistic is (2 - 1) / 7.
catalog = OriginCatalog.starter()
network = build_reuse_network(graph, catalog)
print("components:", [sorted(c) for c in network.components() if len(c) > 1])
print("reuse statistic:", round(reuse_statistic(network), 4))

# %%
# Per-source view: ``dcterms`` is the only external vocabulary in use.
for source, s in sorted(source_statistics(graph, catalog).items()):
    print(source, s.vocabularies, f"{s.pct_reused:.0f}% reused")

# %%
# The same ChEBI compound written under four namespaces forms one group.
# The first catalog row for an origin is its recommended namespace; it is
# reported when one of the grouped URIs already uses it.
uris = ["http://purl.obolibrary.org/obo/CHEBI_15377",
        "http://purl.obolibrary.org/obo/CHEBI/15377",
        "http://identifiers.org/chebi/CHEBI:15377",
        "http://bio2rdf.org/chebi:15377"]
for group in detect_uri_variants(uris, catalog):
    print(group.origin, group.identifier, group.recommended_namespace)
    for uri in group.uris:
        print("   ", uri)

"""
Profiling the synthetic endpoint cloud
======================================

Serve the three bundled N-Quads fixtures as local SPARQL endpoints, probe
what each one supports, extract per-graph schema fragments and merge them
into one schema graph.
"""

# %%
# Start the endpoints. ``serve`` returns a handle that runs a small HTTP
# server on a free localhost port until ``stop()`` is called.
from lodscope import schema_graph
from lodscope.config import package_data
from lodscope.extract import Extractor
from lodscope.simulator import load_fixture, serve
from lodscope.sparql.client import EndpointDescriptor, SparqlClient

cloud = package_data("cloud")
handles = {name: serve(load_fixture(cloud / f"{name}.nq")) for name in ("bio", "ebi", "mold")}
endpoints = {name: EndpointDescriptor(name, h.url, politeness_delay=0) for name, h in handles.items()}

# %%
# Probe capabilities. The simulator speaks full SPARQL 1.1 for template
# shapes, so every probe comes back positive.
client = SparqlClient()
endpoints = {name: client.probe(ep) for name, ep in endpoints.items()}
for name, ep in endpoints.items():
    print(name, ep.capability)

# %%
# Extract one fragment per named graph, then map graph URIs to source ids
# with the bundled rules (both KEGG releases become ``kegg``).
rules = schema_graph.load_rules(cloud / "graph_rules.tsv")
extractor = Extractor(client, sample_n=2000, seed=42)
items = []
for name, ep in endpoints.items():
    for graph_uri, fragment in sorted(extractor.extract_endpoint(ep).items()):
        items.append((schema_graph.normalize_graph_uri(graph_uri, rules), fragment, name))
graph = schema_graph.merge(*items)

# %%
# Element counts per source, and URIs used with more than one kind.
stats = schema_graph.stats(graph)
for source, counts in sorted(stats.per_source.items()):
    print(f"{source:10s}", counts)
print("total     ", stats.total)
print("overlap   ", stats.overlap)

for h in handles.values():
    h.stop()

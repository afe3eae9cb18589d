"""
Label similarity and communities
================================

Turn URIs into readable labels, embed the labels with the bundled test
word vectors, link similar elements across sources and group them with
Louvain.
"""

# %%
# Labels come from the local name when no annotation is available.
from lodscope.community import community_report, louvain
from lodscope.config import package_data
from lodscope.embedding import build_similarity_network, load_embeddings
from lodscope.uris import extract_label

uris = {
    "drugbank": ["http://bio2rdf.org/drugbank_vocabulary:molecular-weight",
                 "http://bio2rdf.org/drugbank_vocabulary:ec-number"],
    "kegg": ["http://bio2rdf.org/kegg_vocabulary:mol_weight",
             "http://bio2rdf.org/kegg_vocabulary:ec_code"],
    "mold": ["http://mold.example.org/vocab/hasMolecularWeight",
             "http://mold.example.org/vocab/hasEcNumber"],
}
labeled = [extract_label(u, source=s) for s, us in uris.items() for u in us]
for item in labeled:
    print(f"{item.source:9s} {item.label}")

# %%
# Label embeddings are idf-weighted means of word vectors. Pairs from
# different sources scoring at least 0.75 are linked, with at most one
# partner per node for each other source.
cloud = package_data("cloud")
table = load_embeddings(cloud / "vectors.txt", cloud / "idf.txt")
network = build_similarity_network(labeled, table, threshold=0.75)
for (a, b), score in network.edges.items():
    print(f"{score:.3f}  {network.by_uri[a].label}  ~  {network.by_uri[b].label}")

# %%
# Louvain splits the network into the two synonym families.
assignment = louvain(network.uris(), network.weighted_edges(), seed=42)
print("modularity:", round(assignment.modularity, 4))
for row in community_report(assignment, labeled):
    print(row.community_id, row.size, row.top(3))

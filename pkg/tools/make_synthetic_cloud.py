"""Generate the bundled synthetic cloud used by tests, demos and the CLI.

Writes three endpoint fixtures (``bio.nq``, ``ebi.nq``, ``mold.nq``) holding
five named graphs, a graph-URI rules file, a small word-vector table with
idf weights, and ``manifest.json`` with the expected schema statistics
computed from the construction tables below (not from the extractor).

Run from the repository root::

    python3 tools/make_synthetic_cloud.py
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "lodscope" / "data" / "cloud"

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
DCT = "http://purl.org/dc/terms/"
SKOS = "http://www.w3.org/2004/02/skos/core#"

DB = "http://bio2rdf.org/drugbank_vocabulary:"
KG = "http://bio2rdf.org/kegg_vocabulary:"
CH = "http://rdf.ebi.ac.uk/terms/chembl#"
MO = "http://mold.example.org/vocab/"
UO_MILLIGRAM = "http://purl.obolibrary.org/obo/UO_0000022"

G_DRUGBANK = "http://bio2rdf.org/drugbank_resource:bio2rdf.dataset.drugbank.R3"
G_KEGG3 = "http://bio2rdf.org/kegg_resource:bio2rdf.dataset.kegg.R3"
G_KEGG4 = "http://bio2rdf.org/kegg_resource:bio2rdf.dataset.kegg.R4"
G_CHEMBL = "http://rdf.ebi.ac.uk/dataset/chembl"
G_MOLD = "http://mold.example.org/graph/release-1"

ENDPOINTS = {"bio": [G_DRUGBANK, G_KEGG3, G_KEGG4], "ebi": [G_CHEMBL], "mold": [G_MOLD]}
SOURCES = {G_DRUGBANK: "drugbank", G_KEGG3: "kegg", G_KEGG4: "kegg", G_CHEMBL: "chembl", G_MOLD: "mold"}
RULES = [
    (r"bio2rdf\.dataset\.drugbank", "drugbank"),
    (r"bio2rdf\.dataset\.kegg\.R\d+$", "kegg"),
    (r"^http://rdf\.ebi\.ac\.uk/dataset/chembl", "chembl"),
    (r"^http://mold\.example\.org/", "mold"),
]

# Synonym families planted across drugbank, kegg and mold.
FAMILIES = {
    "molecular_weight": [DB + "molecular-weight", KG + "mol_weight", MO + "hasMolecularWeight"],
    "enzyme_ec": [DB + "ec-number", KG + "ec_code", MO + "hasEcNumber"],
    "phenotype_omim": [DB + "omim-phenotype", KG + "omim_trait", MO + "hasOmimPhenotype"],
    "gene_id": [DB + "gene-id", KG + "gene_identifier", MO + "hasGeneId"],
}
FAMILY_WORDS = {
    "molecular_weight": ["molecular", "weight", "mol"],
    "enzyme_ec": ["ec", "number", "code"],
    "phenotype_omim": ["omim", "phenotype", "trait"],
    "gene_id": ["gene", "id", "identifier"],
}


# -- value generators -----------------------------------------------------------------

def lit(value, datatype=None, lang=None):
    return ("lit", str(value), datatype, lang)


def iri(value):
    return ("iri", value)


def bnode(label):
    return ("bnode", label)


def n3(term) -> str:
    if term[0] == "iri":
        return f"<{term[1]}>"
    if term[0] == "bnode":
        return f"_:{term[1]}"
    _, value, datatype, lang = term
    text = '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if lang:
        return f"{text}@{lang}"
    if datatype:
        return f"{text}^^<{datatype}>"
    return text


class GraphBuilder:
    """Adds typed instances and property assertions while recording the schema."""

    def __init__(self, graph: str, rng: random.Random):
        self.graph = graph
        self.rng = rng
        self.triples: list[tuple] = []
        self.instances: dict[str, list[str]] = {}
        self.classes: set[str] = set()
        self.object_props: set[str] = set()
        self.data_props: set[str] = set()
        self.datatypes: set[str] = set()

    def add(self, s, p, o):
        self.triples.append((s, p, o))

    def instances_of(self, cls: str, template: str, n: int, start: int = 1) -> list[str]:
        uris = [template.format(i) for i in range(start, start + n)]
        for u in uris:
            self.add(iri(u), iri(RDF_TYPE), iri(cls))
        self.instances.setdefault(cls, []).extend(uris)
        self.classes.add(cls)
        return uris

    def data(self, cls: str, prop: str, make, coverage: float = 1.0):
        for i, x in enumerate(self.instances[cls]):
            if i == 0 or self.rng.random() < coverage:
                value = make(i, self.rng)
                self.add(iri(x), iri(prop), value)
                self.data_props.add(prop)
                if value[3]:
                    self.datatypes.add("http://www.w3.org/1999/02/22-rdf-syntax-ns#langString")
                else:
                    self.datatypes.add(value[2] or XSD + "string")

    def link(self, cls: str, prop: str, target_cls: str, coverage: float = 1.0):
        targets = self.instances[target_cls]
        for i, x in enumerate(self.instances[cls]):
            if i == 0 or self.rng.random() < coverage:
                self.add(iri(x), iri(prop), iri(self.rng.choice(targets)))
                self.object_props.add(prop)

    def external(self, cls: str, prop: str, make, coverage: float = 1.0):
        """Untyped IRI or blank-node objects."""
        for i, x in enumerate(self.instances[cls]):
            if i == 0 or self.rng.random() < coverage:
                self.add(iri(x), iri(prop), make(i, self.rng))
                self.object_props.add(prop)


def floats(lo, hi, digits=3):
    return lambda i, r: lit(f"{r.uniform(lo, hi):.{digits}f}", XSD + "float")


def ints(lo, hi):
    return lambda i, r: lit(r.randint(lo, hi), XSD + "integer")


def strings(fmt):
    return lambda i, r: lit(fmt.format(i=i, n=r.randint(1, 99999)))


def titles(word):
    return lambda i, r: lit(f"{word} {i}", XSD + "string")


def build_drugbank(rng) -> GraphBuilder:
    g = GraphBuilder(G_DRUGBANK, rng)
    res = "http://bio2rdf.org/drugbank:"
    g.instances_of(DB + "Drug", res + "DB{:05d}", 60)
    g.instances_of(DB + "Target", res + "BE{:07d}", 30)
    g.instances_of(DB + "Enzyme", res + "BE{:07d}", 20, start=100)
    g.instances_of(DB + "Transporter", res + "BE{:07d}", 12, start=200)
    g.instances_of(DB + "Carrier", res + "BE{:07d}", 8, start=300)
    g.instances_of(DB + "Drug-Drug-Interaction", res + "ddi{:04d}", 40)
    g.instances_of(DB + "Salt", res + "DBSALT{:06d}", 15)
    g.instances_of(DB + "Category", "http://bio2rdf.org/drugbank_resource:category{:03d}", 10)
    g.instances_of(DB + "Patent", "http://bio2rdf.org/drugbank_resource:patent{:05d}", 12)
    g.instances_of(DB + "Dosage", "http://bio2rdf.org/drugbank_resource:dosage{:04d}", 18)
    g.instances_of(DB + "Indication", "http://bio2rdf.org/drugbank_resource:indication{:04d}", 14)
    g.instances_of(DB + "Reference", "http://bio2rdf.org/drugbank_resource:reference{:05d}", 10)

    g.data(DB + "Drug", DB + "molecular-weight", floats(120, 900))
    g.data(DB + "Drug", DCT + "title", titles("Drug"))
    g.data(DB + "Drug", RDFS_LABEL, lambda i, r: lit(f"drug {i}", lang="en"))
    g.data(DB + "Drug", DB + "cas-registry", strings("{n}-{i}-5"), coverage=0.8)
    g.link(DB + "Drug", DB + "target", DB + "Target")
    g.link(DB + "Drug", DB + "enzyme", DB + "Enzyme", coverage=0.6)
    g.link(DB + "Drug", DB + "transporter", DB + "Transporter", coverage=0.4)
    g.link(DB + "Drug", DB + "carrier", DB + "Carrier", coverage=0.3)
    g.link(DB + "Drug", DB + "category", DB + "Category")
    g.link(DB + "Drug", DB + "salt", DB + "Salt", coverage=0.3)
    g.link(DB + "Drug", DB + "patent", DB + "Patent", coverage=0.3)
    g.link(DB + "Drug", DB + "dosage", DB + "Dosage", coverage=0.4)
    g.external(DB + "Drug", DB + "x-kegg", lambda i, r: iri(f"http://bio2rdf.org/kegg:D{1441 + i:05d}"))
    g.external(DB + "Drug", DB + "x-chebi", lambda i, r: iri(f"http://bio2rdf.org/chebi:{15000 + i}"), coverage=0.5)
    g.external(DB + "Drug", DB + "synonym-node", lambda i, r: bnode(f"syn{i}"), coverage=0.5)
    g.external(DB + "Drug", DCT + "source", lambda i, r: iri("http://www.drugbank.ca"), coverage=0.5)
    g.data(DB + "Target", DB + "gene-id", strings("G{n}"))
    g.data(DB + "Target", DB + "omim-phenotype", strings("OMIM:{n}"), coverage=0.7)
    g.data(DB + "Target", DCT + "title", titles("Target"))
    g.data(DB + "Enzyme", DB + "ec-number", lambda i, r: lit(f"{r.randint(1, 6)}.{r.randint(1, 20)}.{r.randint(1, 9)}.{r.randint(1, 99)}"))
    g.data(DB + "Enzyme", DCT + "title", titles("Enzyme"))
    g.data(DB + "Transporter", DCT + "title", titles("Transporter"))
    g.data(DB + "Carrier", DCT + "title", titles("Carrier"))
    g.link(DB + "Drug-Drug-Interaction", DB + "interactor", DB + "Drug")
    g.data(DB + "Drug-Drug-Interaction", DB + "description", strings("interaction {i}"))
    g.data(DB + "Salt", DB + "molecular-weight", floats(20, 300))
    g.data(DB + "Salt", DCT + "title", titles("Salt"))
    g.data(DB + "Category", DCT + "title", titles("Category"))
    g.data(DB + "Patent", DB + "approved", lambda i, r: lit(f"{r.randint(1990, 2017)}-0{r.randint(1, 9)}-1{r.randint(0, 9)}", XSD + "date"))
    g.data(DB + "Patent", DB + "country", lambda i, r: lit(r.choice(["United States", "Canada"])))
    g.data(DB + "Dosage", DB + "route", lambda i, r: lit(r.choice(["Oral", "Intravenous", "Topical"])))
    g.data(DB + "Dosage", DB + "form", lambda i, r: lit(r.choice(["Tablet", "Solution"])))
    g.link(DB + "Drug", DB + "indication", DB + "Indication", coverage=0.5)
    g.data(DB + "Indication", DCT + "description", strings("indication {i}"))
    g.link(DB + "Indication", DB + "reference", DB + "Reference", coverage=0.6)
    g.external(DB + "Reference", DB + "x-pubmed", lambda i, r: iri(f"http://bio2rdf.org/pubmed:{r.randint(100000, 999999)}"))
    return g


def build_kegg(graph: str, rng, release: int) -> GraphBuilder:
    g = GraphBuilder(graph, rng)
    res = "http://bio2rdf.org/kegg:"
    n_drug = 40 if release == 3 else 55
    g.instances_of(KG + "Drug", res + "D{:05d}", n_drug, start=1441)
    g.instances_of(KG + "Compound", res + "C{:05d}", 35)
    g.instances_of(KG + "Enzyme", "http://bio2rdf.org/ec:{}", 20, start=1)
    g.instances_of(KG + "Pathway", res + "map{:05d}", 15, start=10)
    g.instances_of(KG + "Locus", res + "hsa_{}", 25, start=100)
    g.instances_of(KG + "Disease", res + "H{:05d}", 12)
    g.instances_of(KG + "Glycan", res + "G{:05d}", 10)
    g.instances_of(KG + "Orthology", res + "K{:05d}", 12 if release == 3 else 16)
    if release == 4:
        g.instances_of(KG + "Module", res + "M{:05d}", 10)
        g.instances_of(KG + "Reaction", res + "R{:05d}", 18)

    g.data(KG + "Drug", DCT + "title", titles("Drug"))
    g.data(KG + "Drug", RDFS_LABEL, lambda i, r: lit(f"kegg drug {i}"))
    g.link(KG + "Drug", KG + "same-as", KG + "Compound", coverage=0.5)
    g.link(KG + "Drug", KG + "pathway", KG + "Pathway", coverage=0.7)
    g.link(KG + "Drug", KG + "target", KG + "Locus", coverage=0.6)
    g.data(KG + "Compound", KG + "mol_weight", floats(50, 800))
    g.data(KG + "Compound", KG + "formula", strings("C{n}H{i}"))
    g.external(KG + "Compound", KG + "x-chebi", lambda i, r: iri(f"http://bio2rdf.org/chebi:{15000 + i}"), coverage=0.8)
    g.data(KG + "Enzyme", KG + "ec_code", lambda i, r: lit(f"{r.randint(1, 6)}.{r.randint(1, 20)}.{r.randint(1, 9)}.{i}"))
    g.link(KG + "Enzyme", KG + "pathway", KG + "Pathway", coverage=0.8)
    g.data(KG + "Pathway", DCT + "title", titles("Pathway"))
    g.data(KG + "Locus", KG + "gene_identifier", strings("{n}"))
    g.link(KG + "Locus", KG + "pathway", KG + "Pathway", coverage=0.5)
    g.data(KG + "Disease", KG + "omim_trait", strings("{n}"))
    g.data(KG + "Disease", DCT + "title", titles("Disease"))
    g.link(KG + "Disease", KG + "drug", KG + "Drug", coverage=0.6)
    g.data(KG + "Glycan", KG + "composition", strings("Hex{n}"))
    g.link(KG + "Glycan", KG + "pathway", KG + "Pathway", coverage=0.5)
    g.link(KG + "Orthology", KG + "locus", KG + "Locus")
    g.data(KG + "Orthology", DCT + "title", titles("Orthology"))
    if release == 4:
        g.link(KG + "Module", KG + "pathway", KG + "Pathway")
        g.data(KG + "Reaction", KG + "equation", strings("C{n} <=> C{i}"))
        g.link(KG + "Reaction", KG + "enzyme", KG + "Enzyme", coverage=0.8)
    return g


def build_chembl(rng) -> GraphBuilder:
    g = GraphBuilder(G_CHEMBL, rng)
    res = "http://rdf.ebi.ac.uk/resource/chembl/"
    molecules = g.instances_of(CH + "SmallMolecule", res + "molecule/CHEMBL{}", 45, start=25)
    # small molecules are substances too
    for m in molecules[:30]:
        g.add(iri(m), iri(RDF_TYPE), iri(CH + "Substance"))
    g.instances.setdefault(CH + "Substance", []).extend(molecules[:30])
    g.instances_of(CH + "Substance", res + "molecule/CHEMBL{}", 10, start=900)
    g.instances_of(CH + "Activity", res + "activity/CHEMBL_ACT_{}", 80)
    g.instances_of(CH + "Assay", res + "assay/CHEMBL{}", 25, start=600)
    g.instances_of(CH + "SingleProtein", res + "target/CHEMBL{}", 15, start=200)
    g.instances_of(CH + "Document", res + "document/CHEMBL{}", 12, start=1100)
    g.instances_of(CH + "CellLine", res + "cellline/CHEMBL{}", 8, start=3300)
    g.instances_of(CH + "Journal", res + "journal/CHEMBL{}", 6, start=4100)
    g.instances_of(CH + "ProteinFamily", res + "protclass/CHEMBL_PC_{}", 7)
    g.instances_of(CH + "Organism", res + "organism/CHEMBL_TAX_{}", 5, start=9600)

    g.data(CH + "SmallMolecule", CH + "standardInchiKey", strings("KEY{n}"))
    g.data(CH + "SmallMolecule", RDFS_LABEL, lambda i, r: lit(f"CHEMBL{25 + i}"))
    g.external(CH + "SmallMolecule", CH + "moleculeXref",
               lambda i, r: iri(f"http://purl.obolibrary.org/obo/CHEBI_{15000 + i}"), coverage=0.7)
    g.data(CH + "Substance", SKOS + "prefLabel", lambda i, r: lit(f"substance {i}"))
    g.data(CH + "Activity", CH + "standardValue", floats(0.1, 1000, 2))
    g.data(CH + "Activity", CH + "standardUnits", lambda i, r: lit(r.choice(["nM", "uM"])))
    g.link(CH + "Activity", CH + "hasMolecule", CH + "SmallMolecule")
    g.link(CH + "Activity", CH + "hasAssay", CH + "Assay")
    g.link(CH + "Activity", CH + "hasDocument", CH + "Document", coverage=0.5)
    g.link(CH + "Assay", CH + "hasTarget", CH + "SingleProtein")
    g.link(CH + "Assay", CH + "hasCellLine", CH + "CellLine", coverage=0.3)
    g.data(CH + "Assay", DCT + "description", strings("assay {i}"))
    g.data(CH + "SingleProtein", SKOS + "prefLabel", strings("protein {i}"))
    g.data(CH + "SingleProtein", CH + "organismName", lambda i, r: lit(r.choice(["Homo sapiens", "Mus musculus"])))
    g.data(CH + "Document", DCT + "title", titles("Document"))
    g.data(CH + "Document", CH + "documentYear", ints(1990, 2017))
    g.data(CH + "Document", DCT + "source", lambda i, r: lit("ChEMBL"))
    g.data(CH + "CellLine", RDFS_LABEL, lambda i, r: lit(f"cell line {i}"))
    g.link(CH + "Document", CH + "hasJournal", CH + "Journal")
    g.data(CH + "Journal", DCT + "title", titles("Journal"))
    g.link(CH + "SingleProtein", CH + "hasProteinClassification", CH + "ProteinFamily")
    g.data(CH + "ProteinFamily", RDFS_LABEL, lambda i, r: lit(f"family {i}"))
    g.link(CH + "SingleProtein", CH + "organism", CH + "Organism")
    g.data(CH + "Organism", CH + "taxonomyId", ints(1, 99999))
    # an annotation on a schema element, found by the endpoint label lookup
    g.add(iri(CH + "Activity"), iri(RDFS_LABEL), lit("Bioactivity Measurement"))
    return g


def build_mold(rng) -> GraphBuilder:
    g = GraphBuilder(G_MOLD, rng)
    res = "http://mold.example.org/resource/"
    g.instances_of(MO + "Molecule", res + "molecule/M{:04d}", 50)
    g.instances_of(MO + "Catalyst", res + "catalyst/E{:04d}", 18)
    g.instances_of(MO + "Protein", res + "protein/P{:04d}", 22)
    g.instances_of(MO + "Syndrome", res + "syndrome/S{:04d}", 14)
    g.instances_of(MO + "Study", res + "study/ST{:04d}", 9)
    g.instances_of(MO + "Organism", res + "organism/T{:04d}", 6)
    g.instances_of(MO + "Pathway", res + "pathway/W{:04d}", 7)
    g.instances_of(MO + "Assay", res + "assay/A{:04d}", 8)

    g.data(MO + "Molecule", MO + "hasMolecularWeight", floats(80, 950))
    g.data(MO + "Molecule", MO + "hasName", strings("molecule {i}"))
    g.data(MO + "Molecule", MO + "hasUnit", lambda i, r: lit("mg", UO_MILLIGRAM), coverage=0.4)
    g.link(MO + "Molecule", MO + "bindsTo", MO + "Protein", coverage=0.7)
    g.external(MO + "Molecule", MO + "sameCompound",
               lambda i, r: iri(f"http://identifiers.org/chebi/CHEBI:{15000 + i}"), coverage=0.5)
    g.data(MO + "Catalyst", MO + "hasEcNumber", lambda i, r: lit(f"{r.randint(1, 6)}.{r.randint(1, 9)}.{r.randint(1, 9)}.{i}"))
    g.link(MO + "Catalyst", MO + "catalyses", MO + "Molecule", coverage=0.8)
    g.data(MO + "Protein", MO + "hasGeneId", strings("{n}"))
    g.data(MO + "Protein", MO + "hasSequenceLength", ints(50, 3000))
    g.data(MO + "Syndrome", MO + "hasOmimPhenotype", strings("{n}"))
    g.link(MO + "Syndrome", MO + "involves", MO + "Protein", coverage=0.6)
    g.link(MO + "Study", MO + "studies", MO + "Molecule")
    g.data(MO + "Study", DCT + "title", titles("Study"))
    g.link(MO + "Study", MO + "hasAssay", MO + "Assay")
    g.link(MO + "Protein", MO + "fromOrganism", MO + "Organism")
    g.link(MO + "Catalyst", MO + "partOfPathway", MO + "Pathway", coverage=0.7)
    g.data(MO + "Pathway", MO + "hasName", strings("pathway {i}"))
    g.data(MO + "Organism", MO + "hasName", strings("organism {i}"))
    g.data(MO + "Assay", MO + "hasReadout", floats(0, 1, 4))
    g.data(MO + "Study", MO + "startDate", lambda i, r: lit(f"2017-0{r.randint(1, 9)}-1{r.randint(0, 9)}T10:00:00Z", XSD + "dateTime"))
    return g


# -- word vectors ------------------------------------------------------------------------

def write_vectors(words: list[str], path_vec: Path, path_idf: Path, dim: int = 100, seed: int = 7):
    rng = np.random.default_rng(seed)
    concept = {fam: np.eye(dim)[k] for k, fam in enumerate(FAMILY_WORDS)}
    family_of = {w: fam for fam, ws in FAMILY_WORDS.items() for w in ws}
    vectors = {}
    for w in sorted(words):
        noise = rng.normal(size=dim)
        noise[: len(FAMILY_WORDS)] = 0.0  # keep generic words off the family directions
        noise /= np.linalg.norm(noise)
        if w in family_of:
            vectors[w] = concept[family_of[w]] + 0.25 * noise
        else:
            vectors[w] = noise
    with open(path_vec, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dim}\n")
        for w, v in vectors.items():
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")
    with open(path_idf, "w", encoding="utf-8") as fh:
        for w in vectors:
            fh.write(f"{w} {0.2 if w == 'has' else 3.0 if w in family_of else 2.0}\n")


def main():
    import sys

    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    from lodscope.embedding import tokenize
    from lodscope.uris import extract_label

    rng = random.Random(2018)
    builders = [build_drugbank(rng), build_kegg(G_KEGG3, rng, 3), build_kegg(G_KEGG4, rng, 4),
                build_chembl(rng), build_mold(rng)]
    by_graph = {b.graph: b for b in builders}
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = {"graphs": {}, "endpoints": {}, "sources": {}, "families": FAMILIES}
    for ep, graphs in ENDPOINTS.items():
        lines = []
        for gname in graphs:
            b = by_graph[gname]
            quads = sorted({(n3(s), n3(p), n3(o)) for s, p, o in b.triples})
            lines.extend(f"{s} {p} {o} <{gname}> ." for s, p, o in quads)
            manifest["graphs"][gname] = {"endpoint": ep, "source": SOURCES[gname], "quads": len(quads),
                                         "classes": len(b.classes)}
        (OUT / f"{ep}.nq").write_text("\n".join(lines) + "\n", encoding="utf-8")
        manifest["endpoints"][ep] = {"fixture": f"{ep}.nq", "graphs": graphs}

    kinds = {"class": defaultdict(set), "object_property": defaultdict(set),
             "data_property": defaultdict(set), "datatype": defaultdict(set)}
    for b in builders:
        src = SOURCES[b.graph]
        kinds["class"][src] |= b.classes
        kinds["object_property"][src] |= b.object_props
        kinds["data_property"][src] |= b.data_props
        kinds["datatype"][src] |= b.datatypes
    sources = sorted(set(SOURCES.values()))
    manifest["sources"] = {s: {k: len(kinds[k][s]) for k in kinds} for s in sources}
    manifest["total"] = {k: len(set().union(*kinds[k].values())) for k in kinds}
    all_uris = defaultdict(set)
    for k in kinds:
        for s in sources:
            for u in kinds[k][s]:
                all_uris[u].add(k)
    manifest["overlap"] = sorted(u for u, ks in all_uris.items() if len(ks) > 1)
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (OUT / "graph_rules.tsv").write_text(
        "# regex<TAB>source id; first match wins\n" + "".join(f"{rx}\t{s}\n" for rx, s in RULES), encoding="utf-8")

    words = set()
    for u, ks in all_uris.items():
        if ks - {"datatype"}:
            words.update(tokenize(extract_label(u).label))
    words.update(tokenize("Bioactivity Measurement"))
    write_vectors(sorted(words), OUT / "vectors.txt", OUT / "idf.txt")
    print(json.dumps(manifest["sources"], indent=1), manifest["total"])


if __name__ == "__main__":
    main()

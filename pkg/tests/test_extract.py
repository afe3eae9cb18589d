from __future__ import annotations

from collections import Counter, defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lodscope.extract import (
    ANONYMOUS,
    Extractor,
    SchemaFragment,
    extract_many,
    fragments_from_document,
    fragments_to_document,
    namespace_of,
    summarize,
    uri_pattern,
)
from lodscope.simulator import Behavior, FaultScript, FixtureStore, serve
from lodscope.sparql.client import CapabilityProfile
from lodscope.sparql.terms import IRI, RDF_TYPE, XSD_FLOAT, XSD_INTEGER, XSD_STRING, BlankNode, Literal

from .conftest import ENDPOINTS, descriptor, fast_client

TYPE = IRI(RDF_TYPE)
DB = "http://bio2rdf.org/drugbank_vocabulary:"
G = "http://bio2rdf.org/drugbank_resource:bio2rdf.dataset.drugbank.R3"


def brute_force(store: FixtureStore) -> dict:
    """Classes, counts and realizations by direct enumeration of the quads."""
    out = {}
    for g in sorted(store.graphs):
        triples = store.graphs[g]
        types = defaultdict(set)
        for s, p, o in triples:
            if p == TYPE:
                types[s].add(o)
        members = defaultdict(set)
        for s, cs in types.items():
            for c in cs:
                members[c].add(s)
        classes = {c.value: len(xs) for c, xs in members.items()}
        reals = Counter()
        values = defaultdict(list)
        untyped = Counter()
        for c, xs in members.items():
            for s, p, o in triples:
                if s not in xs or p == TYPE:
                    continue
                values[(c.value, p.value)].append(o)
                if types.get(o):
                    for t in types[o]:
                        reals[(c.value, p.value, "object", t.value)] += 1
                elif isinstance(o, Literal):
                    reals[(c.value, p.value, "data", o.effective_datatype())] += 1
                else:
                    untyped[(c.value, p.value)] += 1
        for (c, p), n in untyped.items():
            nonliteral = [v for v in values[(c, p)] if not isinstance(v, Literal)]
            rng = ANONYMOUS if all(isinstance(v, BlankNode) for v in nonliteral) else None
            reals[(c, p, "object", rng)] += n
        out[g] = (classes, dict(reals))
    return out


def as_tables(fragments: dict[str, SchemaFragment]) -> dict:
    return {
        g: ({c.uri: c.count for c in f.classes},
            {(r.domain, r.property, r.kind, r.range): r.count for r in f.property_realizations})
        for g, f in fragments.items()
    }


@pytest.mark.parametrize("ep", ENDPOINTS)
def test_extraction_equals_brute_force(cloud_endpoints, cloud_stores, ep):
    fragments = Extractor(fast_client()).extract_endpoint(cloud_endpoints[ep])
    assert as_tables(fragments) == brute_force(cloud_stores[ep])


@pytest.mark.parametrize("ep", ENDPOINTS)
def test_full_and_fallback_paths_agree(cloud_endpoints, ep):
    extractor = Extractor(fast_client())
    full = extractor.extract_endpoint(cloud_endpoints[ep])
    minimal = extractor.extract_endpoint(cloud_endpoints[ep].with_capability(CapabilityProfile.minimal()))
    assert full == minimal


def test_same_seed_gives_identical_fragments(cloud_endpoints):
    a = Extractor(fast_client(), sample_n=5, seed=7).extract_endpoint(cloud_endpoints["ebi"])
    b = Extractor(fast_client(), sample_n=5, seed=7).extract_endpoint(cloud_endpoints["ebi"])
    assert a == b


def _listing_store() -> FixtureStore:
    store = FixtureStore()
    weights = ["52221.1", "56345.0", "57530.0"]
    for i, (db, w) in enumerate(zip(["DB03536", "DB00619", "DB00001"], weights)):
        drug = IRI(f"http://bio2rdf.org/drugbank:{db}")
        target = IRI(f"http://bio2rdf.org/drugbank_resource:BE{i}")
        store.add(drug, TYPE, IRI(DB + "Drug"), G)
        store.add(drug, IRI(DB + "molecular-weight"), Literal(w, XSD_FLOAT), G)
        store.add(drug, IRI(DB + "target"), target, G)
        store.add(target, TYPE, IRI(DB + "Target"), G)
    return store


def test_drug_fragment_shape():
    with serve(_listing_store()) as h:
        fragments = Extractor(fast_client()).extract_endpoint(descriptor(h.url))
    frag = fragments[G]
    assert {c.uri: c.count for c in frag.classes} == {DB + "Drug": 3, DB + "Target": 3}
    reals = {(r.domain, r.property): r for r in frag.property_realizations}
    target = reals[(DB + "Drug", DB + "target")]
    assert (target.kind, target.range, target.count) == ("object", DB + "Target", 3)
    weight = reals[(DB + "Drug", DB + "molecular-weight")]
    assert (weight.kind, weight.range, weight.count) == ("data", XSD_FLOAT, 3)
    assert weight.summary.inferred_datatype == XSD_FLOAT
    drug = next(c for c in frag.classes if c.uri == DB + "Drug")
    assert drug.summary.uri_patterns == {r"http://bio2rdf.org/drugbank:DB\d+": 3}
    doc = frag.to_dict("drugbank")
    assert doc["Source"] == "drugbank" and doc["Source URI"] == G
    kinds = {(p["Property"], r["Kind"]) for p in doc["Properties"] for r in p["Property Realizations"]}
    assert kinds == {("target", "Object Property"), ("molecular-weight", "Data Property")}


def test_empty_graph_has_no_classes():
    store = FixtureStore()
    store.add(IRI("http://x/a"), IRI("http://x/p"), Literal("v"), "http://x/g")
    with serve(store) as h:
        fragments = Extractor(fast_client()).extract_endpoint(descriptor(h.url))
    assert fragments["http://x/g"].classes == []
    assert fragments["http://x/g"].property_realizations == []


@pytest.mark.parametrize("minimal", [False, True])
def test_large_class_sample_is_distinct_and_capped(minimal):
    store = FixtureStore()
    for i in range(5000):
        store.add(IRI(f"http://x/i{i}"), TYPE, IRI("http://x/C"), "http://x/g")
    with serve(store) as h:
        ep = descriptor(h.url)
        if minimal:
            ep = ep.with_capability(CapabilityProfile.minimal())
        fragments = Extractor(fast_client(), sample_n=2000).extract_endpoint(ep)
    (cls,) = fragments["http://x/g"].classes
    assert cls.count == 5000
    assert len(cls.sample) == len(set(cls.sample)) == 2000
    assert set(cls.sample) <= {IRI(f"http://x/i{i}") for i in range(5000)}


def test_blank_node_objects_are_anonymous_object_realizations():
    store = FixtureStore()
    for i in range(3):
        store.add(IRI(f"http://x/a{i}"), TYPE, IRI("http://x/A"), "http://x/g")
        store.add(IRI(f"http://x/a{i}"), IRI("http://x/has"), BlankNode(f"b{i}"), "http://x/g")
        store.add(IRI(f"http://x/a{i}"), IRI("http://x/ref"), IRI(f"http://y/{i}"), "http://x/g")
    with serve(store) as h:
        frag = Extractor(fast_client()).extract_endpoint(descriptor(h.url))["http://x/g"]
    reals = {r.property: (r.kind, r.range, r.count) for r in frag.property_realizations}
    assert reals == {"http://x/has": ("object", ANONYMOUS, 3), "http://x/ref": ("object", None, 3)}


def test_failed_subquery_is_marked_and_extraction_continues():
    store = _listing_store()
    with serve(store, FaultScript({"SQ5": Behavior.http_error(400)})) as h:
        frag = Extractor(fast_client()).extract_endpoint(descriptor(h.url))[G]
    assert len(frag.classes) == 2
    assert all(r.error and r.error.startswith("SQ5") for r in frag.property_realizations)
    assert all(r.count == 3 for r in frag.property_realizations)


def test_class_cap_flags_smallest_classes():
    store = FixtureStore()
    for c, n in (("A", 3), ("B", 2), ("C", 1)):
        for i in range(n):
            store.add(IRI(f"http://x/{c}{i}"), TYPE, IRI(f"http://x/{c}"), "http://x/g")
    with serve(store) as h:
        frag = Extractor(fast_client(), class_cap=2).extract_endpoint(descriptor(h.url))["http://x/g"]
    flags = {c.uri[-1]: (c.count, c.mismatch_suspect, len(c.sample)) for c in frag.classes}
    assert flags == {"A": (3, False, 3), "B": (2, False, 2), "C": (1, True, 0)}


def test_extract_many_reports_failures_per_endpoint(cloud_endpoints):
    with serve(FixtureStore()) as h:
        dead = descriptor(h.url, "dead")
    results = dict((ep.id, res) for ep, res in extract_many([cloud_endpoints["mold"], dead],
                                                            Extractor(fast_client()), workers=2))
    assert isinstance(results["dead"], Exception)
    assert len(results["mold"]) == 1


def test_fragment_document_round_trip(cloud_endpoints):
    fragments = Extractor(fast_client()).extract_endpoint(cloud_endpoints["bio"])
    doc = fragments_to_document(cloud_endpoints["bio"], fragments, {g: "x" for g in fragments})
    assert fragments_from_document(doc) == fragments


# -- value summaries -----------------------------------------------------------------

def test_summary_of_nothing():
    s = summarize([])
    assert (s.sample_size, s.is_categorical, s.inferred_datatype, s.namespaces, s.median_length,
            s.uri_patterns) == (0, False, None, {}, None, {})


def test_summary_of_drug_iris():
    s = summarize(["http://bio2rdf.org/drugbank:DB03536", "http://bio2rdf.org/drugbank:DB00619"])
    assert s.namespaces == {"http://bio2rdf.org/drugbank:": 2}
    assert s.uri_patterns == {r"http://bio2rdf.org/drugbank:DB\d+": 2}


def test_summary_of_float_weights():
    s = summarize([52221.1, 56345.0, 57530.0])
    assert s.inferred_datatype == XSD_FLOAT
    assert s.median_length == len("56345.0")


def test_untyped_literals_get_a_guessed_datatype():
    assert summarize([Literal("1"), Literal("22")]).inferred_datatype == XSD_INTEGER
    assert summarize([Literal("1"), Literal("x")]).inferred_datatype == XSD_STRING


def test_categorical_threshold():
    assert summarize([Literal("a")] * 10).is_categorical
    assert not summarize([Literal("a")] * 9 + [Literal("b")] * 2).is_categorical


def test_namespace_helpers():
    assert namespace_of("http://purl.obolibrary.org/obo/CHEBI_15377") == "http://purl.obolibrary.org/obo/"
    assert namespace_of("http://x.org/a#b") == "http://x.org/a#"
    assert uri_pattern("http://x.org/ab12") == r"http://x.org/[a-z]+\d+"


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(
    st.builds(lambda i: IRI(f"http://x.org/n{i % 3}/v{i}"), st.integers(0, 50)),
    st.builds(lambda v: Literal(str(v), XSD_INTEGER), st.integers(-5, 5)),
), max_size=40))
def test_summary_invariants(values):
    s = summarize(values)
    assert s.sample_size == len(values)
    assert sum(s.namespaces.values()) <= s.sample_size
    assert sum(s.uri_patterns.values()) <= s.sample_size
    if values:
        assert s.is_categorical == (len(set(values)) / len(values) <= 0.1)

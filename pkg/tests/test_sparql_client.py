from __future__ import annotations

import string
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lodscope.errors import EndpointError, MalformedResponse, NetworkUnreachable, QueryTimeout
from lodscope.simulator import Behavior, FaultScript, FixtureStore, serve
from lodscope.sparql import templates
from lodscope.sparql.client import CapabilityProfile, EndpointDescriptor, _drop_type_rows
from lodscope.sparql.results import QueryResult, parse, serialize
from lodscope.sparql.terms import IRI, RDF_TYPE, XSD_INTEGER, BlankNode, Literal

from .conftest import descriptor, fast_client

EX = "http://example.org/"
G1, G2 = EX + "g1", EX + "g2"


def _store(*quads) -> FixtureStore:
    store = FixtureStore()
    for s, p, o, g in quads:
        store.add(s, p, o, g)
    return store


def typed(x: str, cls: str, g: str = G1):
    return IRI(EX + x), IRI(RDF_TYPE), IRI(EX + cls), g


# -- descriptor / profile invariants -------------------------------------------

@pytest.mark.parametrize("url", ["localhost:8890/sparql", "ftp://h/sparql", "/sparql", ""])
def test_descriptor_requires_absolute_http_url(url):
    with pytest.raises(ValueError):
        EndpointDescriptor("e", url)


@pytest.mark.parametrize("kwargs", [{"timeout": 0}, {"politeness_delay": -1}, {"max_retries": -1},
                                    {"declared_version": "v2"}])
def test_descriptor_rejects_bad_settings(kwargs):
    with pytest.raises(ValueError):
        EndpointDescriptor("e", "http://h/sparql", **kwargs)


def test_sparql_10_profile_cannot_claim_group_by_or_bind():
    with pytest.raises(ValueError):
        CapabilityProfile("v1_0", True, False, True, True)
    with pytest.raises(ValueError):
        CapabilityProfile("v1_0", False, True, True, True)


# -- results format ------------------------------------------------------------

_text = st.text(alphabet=string.ascii_letters + string.digits + " \"\\\n\t'é", max_size=12)
_iri = st.builds(lambda s: IRI(EX + s), st.text(alphabet=string.ascii_letters + string.digits, max_size=8))
_term = st.one_of(
    _iri,
    st.builds(BlankNode, st.text(alphabet=string.ascii_letters, min_size=1, max_size=5)),
    st.builds(Literal, _text),
    st.builds(lambda v, d: Literal(v, d), _text, st.sampled_from([XSD_INTEGER, EX + "dt"])),
    st.builds(lambda v, lang: Literal(v, None, lang), _text, st.sampled_from(["en", "de"])),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.dictionaries(st.sampled_from(["a", "b", "c"]), _term, max_size=3), max_size=6))
def test_results_round_trip(rows):
    result = QueryResult(["a", "b", "c"], rows)
    assert parse(serialize(result)) == result


@pytest.mark.parametrize("text", [
    "not json",
    '{"results": {"bindings": []}}',
    '{"head": {"vars": ["a"]}, "results": {"bindings": [{"b": {"type": "uri", "value": "http://x/"}}]}}',
    '{"head": {"vars": ["a"]}, "results": {"bindings": [{"a": {"type": "uri", "value": "relative"}}]}}',
])
def test_malformed_results_are_rejected(text):
    with pytest.raises(MalformedResponse):
        parse(text)


# -- execute -------------------------------------------------------------------

def test_execute_singleton_store_returns_one_row():
    with serve(_store(typed("a", "A"))) as h:
        result = fast_client().execute(descriptor(h.url), "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1")
    assert len(result) == 1


def test_execute_empty_store_returns_no_rows():
    with serve(FixtureStore()) as h:
        result = fast_client().execute(descriptor(h.url), "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1")
    assert len(result) == 0


def test_http_500_forever_gives_up_after_max_retries_plus_one():
    script = FaultScript({"*": Behavior.http_error(500)})
    with serve(_store(typed("a", "A")), script) as h:
        ep = descriptor(h.url, max_retries=3)
        with pytest.raises(EndpointError) as info:
            fast_client().execute(ep, "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1")
        assert info.value.status == 500
        assert len(h.requests) == 4


def test_http_400_is_not_retried():
    with serve(_store(typed("a", "A"))) as h:
        with pytest.raises(EndpointError):
            fast_client().execute(descriptor(h.url, max_retries=3), "SELECT * WHERE { ?s ?p ?o }")
        assert len(h.requests) == 1


def test_unreachable_endpoint():
    with serve(FixtureStore()) as h:
        url = h.url
    with pytest.raises(NetworkUnreachable):
        fast_client().execute(descriptor(url), "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1")


def test_timeouts_are_retried_then_surface():
    script = FaultScript({"PING": Behavior.timeout_n_times(5)}, stall_seconds=0.5)
    with serve(_store(typed("a", "A")), script) as h:
        with pytest.raises(QueryTimeout):
            fast_client().execute(descriptor(h.url, timeout=0.2, max_retries=1), templates.PROBES["PING"])


def test_long_queries_use_post_and_short_ones_get(monkeypatch):
    import requests

    calls = []
    real_get, real_post = requests.get, requests.post
    monkeypatch.setattr(requests, "get", lambda *a, **k: calls.append("GET") or real_get(*a, **k))
    monkeypatch.setattr(requests, "post", lambda *a, **k: calls.append("POST") or real_post(*a, **k))
    graph = EX + "g" + "x" * 2100
    with serve(_store(typed("a", "A", graph))) as h:
        client = fast_client()
        short = client.execute_template(descriptor(h.url), "SQ2", {"GRAPH_URI": G1})
        long = client.execute_template(descriptor(h.url), "SQ2", {"GRAPH_URI": graph})
    assert calls == ["GET", "POST"]
    assert len(short) == 0 and len(long) == 1


def test_politeness_delay_spaces_requests():
    with serve(_store(typed("a", "A"))) as h:
        ep = descriptor(h.url, politeness_delay=80)
        client = fast_client()
        for _ in range(4):
            client.execute(ep, templates.PROBES["PING"])
        stamps = [r.timestamp_ms for r in h.requests]
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    assert min(gaps) >= 80


# -- capability probing --------------------------------------------------------

def test_full_fixture_reports_every_capability():
    with serve(_store(typed("a", "A"))) as h:
        cap = fast_client().detect_capabilities(descriptor(h.url))
    assert cap == CapabilityProfile.full()


def test_rejected_group_by_is_detected():
    script = FaultScript({"*": Behavior.reject_keyword("GROUP BY")})
    with serve(_store(typed("a", "A")), script) as h:
        cap = fast_client().detect_capabilities(descriptor(h.url))
    assert cap == CapabilityProfile("v1_1", False, True, True, True)


def test_bind_probe_timing_out_twice_is_masked_by_retries():
    script = FaultScript({"PROBE_BIND": Behavior.timeout_n_times(2)}, stall_seconds=0.5)
    with serve(_store(typed("a", "A")), script) as h:
        cap = fast_client().detect_capabilities(descriptor(h.url, timeout=0.2, max_retries=2))
        assert len(h.requests_for("PROBE_BIND")) == 3
    assert cap.supports_bind


def test_declared_sparql_10_skips_group_by_and_bind_probes():
    with serve(_store(typed("a", "A"))) as h:
        cap = fast_client().detect_capabilities(descriptor(h.url, declared_version="v1_0"))
        shapes = {r.template_id for r in h.requests}
    assert cap.version == "v1_0" and not cap.supports_group_by and not cap.supports_bind
    assert "PROBE_GROUP_BY" not in shapes and "PROBE_BIND" not in shapes


# -- templates over the wire -----------------------------------------------------

def test_sq1_lists_graphs():
    with serve(_store(typed("a", "A", G1), typed("b", "B", G2))) as h:
        rows = fast_client().execute_template(descriptor(h.url), "SQ1").rows
    assert {r["g"] for r in rows} == {IRI(G1), IRI(G2)}


def test_sq2_counts_descending_and_fallback_agrees():
    store = _store(typed("a1", "A"), typed("a2", "A"), typed("a3", "A"), typed("b1", "B"))
    with serve(store) as h:
        ep = descriptor(h.url)
        client = fast_client()
        full = client.execute_template(ep, "SQ2", {"GRAPH_URI": G1})
        restricted = ep.with_capability(CapabilityProfile("v1_0", False, False, True, True))
        fallback = client.execute_template(restricted, "SQ2", {"GRAPH_URI": G1})
        assert {r.template_id for r in h.requests} == {"SQ2", "SQ2F"}
    expected = [(IRI(EX + "A"), 3), (IRI(EX + "B"), 1)]
    assert [(r["Concept"], int(r["cCount"].value)) for r in full.rows] == expected
    assert fallback == full


def test_sq2_fallback_paginates(monkeypatch):
    monkeypatch.setattr(templates, "PAGE_SIZE", 3)
    store = _store(*(typed(f"x{i}", "A" if i % 3 else "B") for i in range(10)))
    with serve(store) as h:
        ep = descriptor(h.url).with_capability(CapabilityProfile.minimal())
        result = fast_client().execute_template(ep, "SQ2", {"GRAPH_URI": G1})
        pages = len(h.requests_for("SQ2F"))
    assert pages == 4
    assert [(r["Concept"].value, r["cCount"].value) for r in result.rows] == [(EX + "A", "6"), (EX + "B", "4")]


def test_timeout_on_canonical_form_switches_to_fallback():
    script = FaultScript({"SQ2": Behavior.timeout_n_times(10)}, stall_seconds=0.5)
    store = _store(typed("a1", "A"), typed("b1", "B"))
    with serve(store, script) as h:
        result = fast_client().execute_template(descriptor(h.url, timeout=0.2, max_retries=0),
                                                "SQ2", {"GRAPH_URI": G1})
        assert h.requests_for("SQ2F")
    assert len(result) == 2


def test_rdf_type_rows_are_dropped_from_sq3():
    rows = [{"p": IRI(RDF_TYPE), "count": Literal("2", XSD_INTEGER)},
            {"p": IRI(EX + "p"), "count": Literal("1", XSD_INTEGER)}]
    out = _drop_type_rows(QueryResult(["p", "count"], rows))
    assert [r["p"] for r in out.rows] == [IRI(EX + "p")]


def _random_store(data) -> FixtureStore:
    n_inst = data.draw(st.integers(1, 12))
    classes = ["A", "B", "C"]
    quads = []
    for i in range(n_inst):
        for c in data.draw(st.sets(st.sampled_from(classes), min_size=1, max_size=2)):
            quads.append(typed(f"i{i}", c))
    for i in range(n_inst):
        for _ in range(data.draw(st.integers(0, 3))):
            p = IRI(EX + data.draw(st.sampled_from(["p", "q"])))
            o = data.draw(st.one_of(
                st.builds(lambda k: IRI(f"{EX}i{k}"), st.integers(0, n_inst - 1)),
                st.builds(lambda v: Literal(str(v), XSD_INTEGER), st.integers(0, 5)),
                st.builds(Literal, st.sampled_from(["x", "y"])),
                st.builds(BlankNode, st.sampled_from(["b0", "b1"])),
            ))
            quads.append((IRI(f"{EX}i{i}"), p, o, G1))
    return _store(*quads)


def _multiset(result: QueryResult) -> Counter:
    return Counter(tuple(sorted(row.items())) for row in result.rows)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_canonical_and_fallback_forms_agree_as_multisets(data):
    store = _random_store(data)
    client = fast_client()
    with serve(store) as h:
        full = descriptor(h.url)
        minimal = full.with_capability(CapabilityProfile.minimal())
        for cls in ("A", "B"):
            params = {"GRAPH_URI": G1, "CONCEPT_URI": EX + cls}
            for tid, extra in (("SQ2", {}), ("SQ3", {}), ("SQ4", {}), ("SQ5", {"PROPERTY_URI": EX + "p"})):
                p = {k: v for k, v in {**params, **extra}.items() if k in templates.REQUIRED_PARAMS[tid]}
                a = client.execute_template(full, tid, p, limit=100)
                b = client.execute_template(minimal, tid, p, limit=100)
                assert _multiset(a) == _multiset(b), tid

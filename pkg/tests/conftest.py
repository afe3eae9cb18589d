from __future__ import annotations

import json
from pathlib import Path

import pytest

from lodscope.config import package_data
from lodscope.simulator import FaultScript, load_fixture, serve
from lodscope.sparql.client import EndpointDescriptor, PolitenessLimiter, SparqlClient

CLOUD = package_data("cloud")
GOLDEN = Path(__file__).parent / "golden"
ENDPOINTS = ("bio", "ebi", "mold")


def fast_client() -> SparqlClient:
    """Client with millisecond backoff and a private politeness limiter."""
    return SparqlClient(backoff_base=0.01, backoff_cap=0.05, limiter=PolitenessLimiter())


def descriptor(url: str, endpoint_id: str = "ep", **kwargs) -> EndpointDescriptor:
    kwargs.setdefault("politeness_delay", 0)
    kwargs.setdefault("max_retries", 2)
    kwargs.setdefault("timeout", 5)
    return EndpointDescriptor(endpoint_id, url, **kwargs)


@pytest.fixture(scope="session")
def manifest() -> dict:
    return json.loads((CLOUD / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def cloud_stores() -> dict:
    return {ep: load_fixture(CLOUD / f"{ep}.nq") for ep in ENDPOINTS}


@pytest.fixture(scope="session")
def cloud_endpoints(cloud_stores):
    """The three synthetic-cloud endpoints served for the whole session."""
    handles = {ep: serve(store, FaultScript(seed=0)) for ep, store in cloud_stores.items()}
    try:
        yield {ep: descriptor(h.url, ep) for ep, h in handles.items()}
    finally:
        for h in handles.values():
            h.stop()


@pytest.fixture(scope="session")
def cloud_graph(cloud_endpoints):
    """The merged schema graph of the synthetic cloud (full-capability path)."""
    from lodscope import schema_graph
    from lodscope.extract import Extractor

    rules = schema_graph.load_rules(CLOUD / "graph_rules.tsv")
    extractor = Extractor(fast_client())
    items = []
    for ep_id, ep in sorted(cloud_endpoints.items()):
        for graph_uri, fragment in sorted(extractor.extract_endpoint(ep).items()):
            items.append((schema_graph.normalize_graph_uri(graph_uri, rules), fragment, ep_id))
    return schema_graph.merge(*items)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)

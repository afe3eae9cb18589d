from __future__ import annotations

import pytest

from lodscope.errors import MissingParam, UnsupportedTemplate
from lodscope.sparql import templates

from .conftest import GOLDEN

PARAMS = {"GRAPH_URI": "GRAPH_URI", "CONCEPT_URI": "CONCEPT_URI", "PROPERTY_URI": "PROPERTY_URI"}
REAL = {
    "GRAPH_URI": "http://bio2rdf.org/drugbank_resource:bio2rdf.dataset.drugbank.R3",
    "CONCEPT_URI": "http://bio2rdf.org/drugbank_vocabulary:Drug",
    "PROPERTY_URI": "http://bio2rdf.org/drugbank_vocabulary:target",
}


def golden(tid: str) -> str:
    return (GOLDEN / f"{tid}.rq").read_text(encoding="utf-8").rstrip("\n")


@pytest.mark.parametrize("tid", templates.TEMPLATE_IDS)
def test_render_matches_golden_with_placeholders_kept(tid):
    params = {k: PARAMS[k] for k in templates.REQUIRED_PARAMS[tid]}
    assert templates.render(tid, params) == golden(tid)


@pytest.mark.parametrize("tid", templates.TEMPLATE_IDS)
def test_render_substitutes_every_placeholder(tid):
    params = {k: REAL[k] for k in templates.REQUIRED_PARAMS[tid]}
    expected = golden(tid)
    for k, v in params.items():
        expected = expected.replace(f"<{k}>", f"<{v}>")
    assert templates.render(tid, params) == expected


def test_sample_limit_is_substituted():
    text = templates.render("SQ4", {k: REAL[k] for k in ("GRAPH_URI", "CONCEPT_URI")}, limit=50)
    assert text.endswith("ORDER BY RAND() LIMIT 50")


def test_missing_param_is_reported():
    with pytest.raises(MissingParam):
        templates.render("SQ3", {"GRAPH_URI": REAL["GRAPH_URI"]})


def test_unknown_template_is_rejected():
    with pytest.raises(UnsupportedTemplate):
        templates.render("SQ9", {})


def test_param_with_angle_bracket_is_rejected():
    with pytest.raises(ValueError):
        templates.render("SQ2", {"GRAPH_URI": "http://x/> } DROP ALL {"})


def test_fallback_forms_avoid_restricted_keywords():
    for tid, text in templates.FALLBACK.items():
        assert "GROUP BY" not in text and "BIND" not in text and "RAND()" not in text, tid


@pytest.mark.parametrize("tid", templates.TEMPLATE_IDS)
def test_identify_recovers_shape_and_params(tid):
    params = {k: REAL[k] for k in templates.REQUIRED_PARAMS[tid]}
    shape, found = templates.identify(templates.render(tid, params, limit=7))
    assert shape == tid
    assert {k: found[k] for k in params} == params
    fshape, ffound = templates.identify(templates.render_fallback(tid, params, limit=10, offset=20))
    assert fshape == tid + "F"
    assert ffound["limit"] == "10" and ffound["offset"] == "20"


def test_identify_rejects_other_queries():
    assert templates.identify("SELECT * WHERE { ?s ?p ?o }") is None

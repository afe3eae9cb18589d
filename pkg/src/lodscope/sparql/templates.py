"""Query texts used by the extractor, capability probes, and label lookup.

``CANONICAL`` holds the five schema extraction queries verbatim.  The
``FALLBACK`` forms are this package's own choices for endpoints that lack
GROUP BY, BIND, or ORDER BY RAND(), or that time out on the canonical
form: every fallback is a plain paginated listing whose aggregation or
subsampling happens client-side, so the final results do not depend on the
form used.
"""

from __future__ import annotations

import re

from ..errors import MissingParam, UnsupportedTemplate
from .terms import RDFS_LABEL, SKOS_PREFLABEL

TEMPLATE_IDS = ("SQ1", "SQ2", "SQ3", "SQ4", "SQ5")

REQUIRED_PARAMS = {
    "SQ1": (),
    "SQ2": ("GRAPH_URI",),
    "SQ3": ("GRAPH_URI", "CONCEPT_URI"),
    "SQ4": ("GRAPH_URI", "CONCEPT_URI"),
    "SQ5": ("GRAPH_URI", "CONCEPT_URI", "PROPERTY_URI"),
    "LABEL": ("TERM_URI",),
}

DEFAULT_SAMPLE = 2000
PAGE_SIZE = 10_000
FALLBACK_FETCH_CAP = 20_000

CANONICAL = {
    "SQ1": (
        "SELECT DISTINCT ?g WHERE {\n"
        "\tGRAPH ?g { ?s ?p ?o }\n"
        "}"
    ),
    "SQ2": (
        "SELECT ?Concept (COUNT (?x) AS ?cCount) WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?x rdf:type ?Concept }\n"
        "} GROUP BY ?Concept ORDER BY DESC(?cCount)"
    ),
    "SQ3": (
        "SELECT DISTINCT ?p ?c (COUNT(?x) AS ?count) ?valType WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?x rdf:type <CONCEPT_URI>; ?p ?o . \n"
        "    OPTIONAL {?o rdf:type ?c} . \n"
        "    FILTER(!(?p = 'rdf:type')) . \n"
        "    BIND(DATATYPE(?o) AS ?valType) }\n"
        "} GROUP BY ?p ?c ?valType ORDER BY DESC(?count)"
    ),
    "SQ4": (
        "SELECT ?x WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?x rdf:type <CONCEPT_URI> }\n"
        "} ORDER BY RAND() LIMIT $limit"
    ),
    "SQ5": (
        "SELECT ?x WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?c rdf:type <CONCEPT_URI>; <PROPERTY_URI> ?x }\n"
        "} ORDER BY RAND() LIMIT $limit"
    ),
}

FALLBACK = {
    "SQ1": (
        "SELECT DISTINCT ?g WHERE {\n"
        "\tGRAPH ?g { ?s ?p ?o }\n"
        "} ORDER BY ?g LIMIT $limit OFFSET $offset"
    ),
    "SQ2": (
        "SELECT ?x ?Concept WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?x rdf:type ?Concept }\n"
        "} ORDER BY ?Concept ?x LIMIT $limit OFFSET $offset"
    ),
    "SQ3": (
        "SELECT ?x ?p ?o ?c WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?x rdf:type <CONCEPT_URI>; ?p ?o . \n"
        "    OPTIONAL {?o rdf:type ?c} . \n"
        "    FILTER(?p != rdf:type) }\n"
        "} ORDER BY ?x ?p ?o ?c LIMIT $limit OFFSET $offset"
    ),
    "SQ4": (
        "SELECT ?x WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?x rdf:type <CONCEPT_URI> }\n"
        "} ORDER BY ?x LIMIT $limit OFFSET $offset"
    ),
    "SQ5": (
        "SELECT ?x WHERE {\n"
        "\tGRAPH <GRAPH_URI> { ?c rdf:type <CONCEPT_URI>; <PROPERTY_URI> ?x }\n"
        "} ORDER BY ?c ?x LIMIT $limit OFFSET $offset"
    ),
}

# Keywords whose support decides whether the canonical form is usable.
CANONICAL_NEEDS = {
    "SQ1": ("named_graphs",),
    "SQ2": ("named_graphs", "group_by"),
    "SQ3": ("named_graphs", "group_by", "bind"),
    "SQ4": ("named_graphs", "order_by_rand"),
    "SQ5": ("named_graphs", "order_by_rand"),
}

PROBES = {
    "PING": "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1",
    "PROBE_GROUP_BY": "SELECT ?p (COUNT(?s) AS ?n) WHERE { ?s ?p ?o } GROUP BY ?p LIMIT 1",
    "PROBE_BIND": "SELECT ?s ?t WHERE { ?s ?p ?o . BIND(DATATYPE(?o) AS ?t) } LIMIT 1",
    "PROBE_RAND": "SELECT ?s WHERE { ?s ?p ?o } ORDER BY RAND() LIMIT 1",
    "PROBE_GRAPH": "SELECT ?g WHERE { GRAPH ?g { ?s ?p ?o } } LIMIT 1",
}

LABEL_QUERY = (
    "SELECT ?label WHERE {\n"
    f"\t{{ <TERM_URI> <{RDFS_LABEL}> ?label }} UNION {{ <TERM_URI> <{SKOS_PREFLABEL}> ?label }}\n"
    "}"
)


def _substitute(text: str, params: dict[str, str], limit: int, offset: int) -> str:
    for name, value in params.items():
        if any(c in value for c in "<> \n\t"):
            raise ValueError(f"{name} is not a plain IRI: {value!r}")
        text = text.replace(f"<{name}>", f"<{value}>")
    return text.replace("$limit", str(limit)).replace("$offset", str(offset))


def _check(template_id: str, params: dict[str, str]) -> None:
    if template_id not in REQUIRED_PARAMS:
        raise UnsupportedTemplate(f"unknown template {template_id!r}")
    missing = [p for p in REQUIRED_PARAMS[template_id] if not params.get(p)]
    if missing:
        raise MissingParam(f"{template_id} requires {', '.join(missing)}")


def render(template_id: str, params: dict[str, str] | None = None, *,
           limit: int = DEFAULT_SAMPLE) -> str:
    """Canonical text of ``template_id`` with placeholders filled in."""
    params = params or {}
    _check(template_id, params)
    if template_id == "LABEL":
        return _substitute(LABEL_QUERY, params, limit, 0)
    return _substitute(CANONICAL[template_id], params, limit, 0)


def render_fallback(template_id: str, params: dict[str, str] | None = None, *,
                    limit: int = PAGE_SIZE, offset: int = 0) -> str:
    params = params or {}
    _check(template_id, params)
    if template_id not in FALLBACK:
        raise UnsupportedTemplate(f"{template_id} has no fallback form")
    return _substitute(FALLBACK[template_id], params, limit, offset)


def _pattern(text: str) -> re.Pattern:
    pieces = re.split(r"(<(?:GRAPH_URI|CONCEPT_URI|PROPERTY_URI|TERM_URI)>|\$limit|\$offset)", text)
    seen: set[str] = set()
    out = []
    for piece in pieces:
        if piece in ("$limit", "$offset"):
            out.append(f"(?P<{piece[1:]}>\\d+)")
        elif piece[1:-1] in REQUIRED_PARAMS["SQ5"] + REQUIRED_PARAMS["LABEL"] and piece[0] == "<":
            name = piece[1:-1]
            out.append(f"<(?P={name})>" if name in seen else f"<(?P<{name}>[^<>\\s]+)>")
            seen.add(name)
        else:
            out.append(re.escape(piece))
    return re.compile("".join(out) + r"\Z")


_SHAPES: list[tuple[str, re.Pattern]] = (
    [(tid, _pattern(CANONICAL[tid])) for tid in TEMPLATE_IDS]
    + [(tid + "F", _pattern(FALLBACK[tid])) for tid in TEMPLATE_IDS]
    + [(pid, _pattern(text)) for pid, text in PROBES.items()]
    + [("LABEL", _pattern(LABEL_QUERY))]
)


def identify(query: str) -> tuple[str, dict[str, str]] | None:
    """Recognise one of the known query shapes.

    Returns the shape id (``SQ2``, ``SQ2F``, ``PROBE_BIND``, ``LABEL`` ...)
    and the extracted placeholders, or None for any other text.
    """
    for shape_id, rx in _SHAPES:
        m = rx.match(query)
        if m:
            return shape_id, {k: v for k, v in m.groupdict().items() if v is not None}
    return None

"""Direct evaluation of the known query shapes over a FixtureStore."""

from __future__ import annotations

import random
from collections import Counter

from ..sparql import templates
from ..sparql.results import QueryResult
from ..sparql.terms import IRI, RDF_TYPE, RDFS_LABEL, SKOS_PREFLABEL, XSD_INTEGER, Literal, term_sort_key
from .store import FixtureStore


class UnknownShape(Exception):
    pass


def _count(n: int) -> Literal:
    return Literal(str(n), XSD_INTEGER)


def _row_key(row: dict, order: list[str]) -> tuple:
    return tuple((0, ()) if row.get(v) is None else (1, term_sort_key(row[v])) for v in order)


def _page(rows: list[dict], params: dict, order: list[str]) -> list[dict]:
    rows = sorted(rows, key=lambda r: _row_key(r, order))
    offset = int(params.get("offset", 0))
    return rows[offset:offset + int(params["limit"])]


def _sample(values: list, limit: int, seed: int, query: str) -> list:
    rng = random.Random(f"{seed}|{query}")
    if len(values) <= limit:
        values = list(values)
        rng.shuffle(values)
        return values
    return rng.sample(values, limit)


def _sq3_solutions(store: FixtureStore, params: dict) -> list[dict]:
    idx = store.index(params["GRAPH_URI"])
    concept = IRI(params["CONCEPT_URI"])
    out = []
    for x in idx.instances.get(concept, []):
        for p, o in idx.by_subject.get(x, []):
            if p == IRI(RDF_TYPE):
                continue
            types = sorted(idx.types.get(o, ()), key=term_sort_key) or [None]
            for c in types:
                row = {"x": x, "p": p, "o": o}
                if c is not None:
                    row["c"] = c
                out.append(row)
    return out


def _sq5_solutions(store: FixtureStore, params: dict) -> list[dict]:
    idx = store.index(params["GRAPH_URI"])
    concept, prop = IRI(params["CONCEPT_URI"]), IRI(params["PROPERTY_URI"])
    return [{"c": c, "x": o}
            for c in idx.instances.get(concept, [])
            for p, o in idx.by_subject.get(c, []) if p == prop]


def _all_triples(store: FixtureStore):
    for g in sorted(store.graphs):
        for t in sorted(store.graphs[g], key=lambda t: tuple(map(term_sort_key, t))):
            yield g, t


def evaluate(store: FixtureStore, query: str, seed: int = 0) -> tuple[str, dict, QueryResult]:
    """Answer ``query`` if it is a known shape.

    Returns (shape id, extracted params, result); raises UnknownShape otherwise.
    """
    found = templates.identify(query)
    if found is None:
        raise UnknownShape(query[:80])
    shape, params = found

    if shape == "PING":
        rows = [{"s": t[0]} for _, t in _all_triples(store)][:1]
        return shape, params, QueryResult(["s"], rows)
    if shape == "PROBE_GROUP_BY":
        counts = Counter(t[1] for _, t in _all_triples(store))
        rows = [{"p": p, "n": _count(n)} for p, n in sorted(counts.items(), key=lambda kv: term_sort_key(kv[0]))]
        return shape, params, QueryResult(["p", "n"], rows[:1])
    if shape == "PROBE_BIND":
        rows = []
        for _, (s, p, o) in _all_triples(store):
            row = {"s": s}
            if isinstance(o, Literal):
                row["t"] = IRI(o.effective_datatype())
            rows.append(row)
            break
        return shape, params, QueryResult(["s", "t"], rows)
    if shape == "PROBE_RAND":
        subjects = [t[0] for _, t in _all_triples(store)]
        return shape, params, QueryResult(["s"], [{"s": s} for s in _sample(subjects, 1, seed, query)])
    if shape == "PROBE_GRAPH":
        graphs = [g for g in sorted(store.graphs) if store.graphs[g]]
        return shape, params, QueryResult(["g"], [{"g": IRI(g)} for g in graphs[:1]])

    if shape in ("SQ1", "SQ1F"):
        rows = [{"g": IRI(g)} for g in sorted(store.graphs) if store.graphs[g]]
        if shape == "SQ1F":
            rows = _page(rows, params, ["g"])
        return shape, params, QueryResult(["g"], rows)

    if shape == "SQ2":
        idx = store.index(params["GRAPH_URI"])
        counts = {c: len(xs) for c, xs in idx.instances.items()}
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], term_sort_key(kv[0])))
        rows = [{"Concept": c, "cCount": _count(n)} for c, n in ordered]
        return shape, params, QueryResult(["Concept", "cCount"], rows)
    if shape == "SQ2F":
        idx = store.index(params["GRAPH_URI"])
        rows = [{"x": x, "Concept": c} for c, xs in idx.instances.items() for x in xs]
        return shape, params, QueryResult(["x", "Concept"], _page(rows, params, ["Concept", "x"]))

    if shape == "SQ3":
        counts: Counter = Counter()
        for sol in _sq3_solutions(store, params):
            o = sol["o"]
            vt = IRI(o.effective_datatype()) if isinstance(o, Literal) else None
            counts[(sol["p"], sol.get("c"), vt)] += 1
        ordered = sorted(counts.items(), key=lambda kv: (
            -kv[1], term_sort_key(kv[0][0]),
            kv[0][1].value if kv[0][1] else "", kv[0][2].value if kv[0][2] else ""))
        rows = []
        for (p, c, vt), n in ordered:
            row = {"p": p, "count": _count(n)}
            if c is not None:
                row["c"] = c
            if vt is not None:
                row["valType"] = vt
            rows.append(row)
        return shape, params, QueryResult(["p", "c", "count", "valType"], rows)
    if shape == "SQ3F":
        rows = _sq3_solutions(store, params)
        return shape, params, QueryResult(["x", "p", "o", "c"], _page(rows, params, ["x", "p", "o", "c"]))

    if shape in ("SQ4", "SQ4F"):
        idx = store.index(params["GRAPH_URI"])
        rows = [{"x": x} for x in idx.instances.get(IRI(params["CONCEPT_URI"]), [])]
        if shape == "SQ4":
            rows = _sample(rows, int(params["limit"]), seed, query)
        else:
            rows = _page(rows, params, ["x"])
        return shape, params, QueryResult(["x"], rows)

    if shape in ("SQ5", "SQ5F"):
        sols = _sq5_solutions(store, params)
        if shape == "SQ5":
            sols = _sample(sols, int(params["limit"]), seed, query)
        else:
            sols = _page(sols, params, ["c", "x"])
        return shape, params, QueryResult(["x"], [{"x": s["x"]} for s in sols])

    if shape == "LABEL":
        term = IRI(params["TERM_URI"])
        labels = set()
        for g in store.graphs.values():
            for s, p, o in g:
                if s == term and p in (IRI(RDFS_LABEL), IRI(SKOS_PREFLABEL)):
                    labels.add(o)
        rows = [{"label": o} for o in sorted(labels, key=term_sort_key)]
        return shape, params, QueryResult(["label"], rows)

    raise UnknownShape(shape)

"""In-memory quad store and the line-based fixture format.

One quad per line::

    <subject> <predicate> <object> <graph> .

Objects may be ``<iri>``, ``_:label`` or a quoted literal with an optional
``^^<datatype>`` or ``@lang`` suffix.  Blank lines and ``#`` comments are
ignored; the trailing dot is optional.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from ..errors import ParseError
from ..sparql.terms import IRI, RDF_TYPE, BlankNode, Literal, Term, is_absolute_iri, term_sort_key

Triple = tuple[Term, Term, Term]

_TOKEN = re.compile(
    r'\s*(?:'
    r'<(?P<iri>[^<>\s]*)>'
    r'|_:(?P<bnode>[A-Za-z0-9_\-]+(?:\.[A-Za-z0-9_\-]+)*)'
    r'|"(?P<lit>(?:[^"\\]|\\.)*)"(?:\^\^<(?P<dt>[^<>\s]*)>|@(?P<lang>[A-Za-z]+(?:-[A-Za-z0-9]+)*))?'
    r')'
)
_UNESCAPE = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}


def _unescape(text: str) -> str:
    return re.sub(r"\\(.)", lambda m: _UNESCAPE.get(m.group(1), m.group(1)), text)


@dataclass
class FixtureStore:
    graphs: dict[str, set[Triple]] = field(default_factory=dict)

    def __post_init__(self):
        self._index = None

    def add(self, s: Term, p: Term, o: Term, g: str) -> None:
        if not is_absolute_iri(g):
            raise ValueError(f"graph IRI is not absolute: {g!r}")
        for t in (s, p, o):
            if isinstance(t, IRI) and not is_absolute_iri(t.value):
                raise ValueError(f"IRI is not absolute: {t.value!r}")
        self.graphs.setdefault(g, set()).add((s, p, o))
        self._index = None

    def add_all(self, quads: Iterable[tuple[Term, Term, Term, str]]) -> None:
        for s, p, o, g in quads:
            self.add(s, p, o, g)

    def quad_count(self) -> int:
        return sum(len(t) for t in self.graphs.values())

    def quads(self) -> Iterator[tuple[Term, Term, Term, str]]:
        for g in sorted(self.graphs):
            for s, p, o in sorted(self.graphs[g], key=lambda t: tuple(map(term_sort_key, t))):
                yield s, p, o, g

    # indexes used by the evaluator
    def index(self, graph: str) -> "GraphIndex":
        if self._index is None:
            self._index = {}
        if graph not in self._index:
            self._index[graph] = GraphIndex(self.graphs.get(graph, set()))
        return self._index[graph]


class GraphIndex:
    def __init__(self, triples: set[Triple]):
        self.instances: dict[Term, list[Term]] = defaultdict(list)
        self.types: dict[Term, set[Term]] = defaultdict(set)
        self.by_subject: dict[Term, list[tuple[Term, Term]]] = defaultdict(list)
        for s, p, o in triples:
            self.by_subject[s].append((p, o))
            if p == IRI(RDF_TYPE):
                self.instances[o].append(s)
                self.types[s].add(o)
        for v in self.instances.values():
            v.sort(key=term_sort_key)
        for v in self.by_subject.values():
            v.sort(key=lambda po: (term_sort_key(po[0]), term_sort_key(po[1])))


def _parse_term(m: re.Match) -> Term:
    if m.group("iri") is not None:
        return IRI(m.group("iri"))
    if m.group("bnode") is not None:
        return BlankNode(m.group("bnode"))
    return Literal(_unescape(m.group("lit")), m.group("dt"), m.group("lang"))


def parse_line(line: str, lineno: int = 0) -> tuple[Term, Term, Term, str] | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    terms = []
    pos = 0
    text = stripped[:-1].rstrip() if stripped.endswith(".") else stripped
    while pos < len(text) and len(terms) < 4:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(lineno, f"cannot read term at column {pos + 1}")
        terms.append(_parse_term(m))
        pos = m.end()
    if text[pos:].strip() or len(terms) != 4:
        raise ParseError(lineno, "expected subject predicate object graph")
    s, p, o, g = terms
    if isinstance(s, Literal) or not isinstance(p, IRI) or not isinstance(g, IRI):
        raise ParseError(lineno, "invalid term position")
    for t in (s, p, o, g):
        if isinstance(t, IRI) and not is_absolute_iri(t.value):
            raise ParseError(lineno, f"IRI is not absolute: {t.value!r}")
    return s, p, o, g.value


def load_fixture(path: str | Path) -> FixtureStore:
    store = FixtureStore()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            quad = parse_line(line, lineno)
            if quad is not None:
                store.add(*quad)
    return store


def dump_fixture(store: FixtureStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s, p, o, g in store.quads():
            fh.write(f"{s.n3()} {p.n3()} {o.n3()} <{g}> .\n")

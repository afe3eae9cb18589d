"""RDF term value types used in query results and fixture stores."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
SKOS = "http://www.w3.org/2004/02/skos/core#"

RDF_TYPE = RDF + "type"
RDFS_LABEL = RDFS + "label"
SKOS_PREFLABEL = SKOS + "prefLabel"
XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_FLOAT = XSD + "float"
XSD_DOUBLE = XSD + "double"
XSD_DECIMAL = XSD + "decimal"
XSD_DATE = XSD + "date"
XSD_DATETIME = XSD + "dateTime"
XSD_BOOLEAN = XSD + "boolean"
RDF_LANGSTRING = RDF + "langString"

_ABSOLUTE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


def is_absolute_iri(value: str) -> bool:
    return bool(_ABSOLUTE.match(value)) and not any(c in value for c in " <>\"{}|\\^`")


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def lexical(self) -> str:
        return self.value

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, order=True)
class Literal:
    value: str
    datatype: Optional[str] = None
    lang: Optional[str] = None

    def lexical(self) -> str:
        return self.value

    def effective_datatype(self) -> str:
        """Datatype as reported by SPARQL 1.1 ``DATATYPE()``."""
        if self.lang:
            return RDF_LANGSTRING
        return self.datatype or XSD_STRING

    def n3(self) -> str:
        text = (self.value.replace("\\", "\\\\").replace('"', '\\"')
                .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t"))
        if self.lang:
            return f'"{text}"@{self.lang}'
        if self.datatype:
            return f'"{text}"^^<{self.datatype}>'
        return f'"{text}"'


@dataclass(frozen=True, order=True)
class BlankNode:
    value: str

    def lexical(self) -> str:
        return "_:" + self.value

    def n3(self) -> str:
        return "_:" + self.value


Term = Union[IRI, Literal, BlankNode]


def term_sort_key(term: Term) -> tuple:
    kind = {IRI: 0, BlankNode: 1, Literal: 2}[type(term)]
    if isinstance(term, Literal):
        return (kind, term.value, term.datatype or "", term.lang or "")
    return (kind, term.value, "", "")


def term_to_json(term: Term) -> dict:
    """Encode a term the way the SPARQL JSON results format does."""
    if isinstance(term, IRI):
        return {"type": "uri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.value}
    out = {"type": "literal", "value": term.value}
    if term.lang:
        out["xml:lang"] = term.lang
    elif term.datatype:
        out["datatype"] = term.datatype
    return out


def term_from_json(obj: dict) -> Term:
    kind = obj.get("type")
    value = obj.get("value")
    if not isinstance(value, str):
        raise ValueError("term value must be a string")
    if kind == "uri":
        if not is_absolute_iri(value):
            raise ValueError(f"IRI is not absolute: {value!r}")
        return IRI(value)
    if kind == "bnode":
        return BlankNode(value)
    if kind in ("literal", "typed-literal"):
        return Literal(value, obj.get("datatype"), obj.get("xml:lang"))
    raise ValueError(f"unknown term type {kind!r}")

"""SPARQL 1.1 JSON results: parsing and serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import MalformedResponse
from .terms import Term, term_from_json, term_to_json

MEDIA_TYPE = "application/sparql-results+json"


@dataclass
class QueryResult:
    variables: list[str]
    rows: list[dict[str, Term]] = field(default_factory=list)

    def __post_init__(self):
        declared = set(self.variables)
        for row in self.rows:
            extra = set(row) - declared
            if extra:
                raise ValueError(f"binding for undeclared variable(s) {sorted(extra)}")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        return [row.get(name) for row in self.rows]


def serialize(result: QueryResult) -> str:
    doc = {
        "head": {"vars": list(result.variables)},
        "results": {
            "bindings": [
                {var: term_to_json(row[var]) for var in result.variables if var in row}
                for row in result.rows
            ]
        },
    }
    return json.dumps(doc)


def parse(text: str | bytes) -> QueryResult:
    """Parse a SPARQL JSON results document.

    Raises:
        MalformedResponse: if the document is not valid JSON, lacks the
            head/results structure, or binds an undeclared variable.
    """
    try:
        doc = json.loads(text)
        variables = list(doc["head"]["vars"])
        bindings = doc["results"]["bindings"]
        rows = [{k: term_from_json(v) for k, v in b.items()} for b in bindings]
        return QueryResult(variables, rows)
    except MalformedResponse:
        raise
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise MalformedResponse(f"unparseable SPARQL results: {exc}") from exc

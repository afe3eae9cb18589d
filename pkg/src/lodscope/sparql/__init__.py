from .client import (
    CapabilityProfile,
    EndpointDescriptor,
    PolitenessLimiter,
    SparqlClient,
    detect_capabilities,
    execute,
    execute_template,
)
from .results import MEDIA_TYPE, QueryResult, parse, serialize
from .terms import IRI, BlankNode, Literal, Term

__all__ = [
    "BlankNode", "CapabilityProfile", "EndpointDescriptor", "IRI", "Literal",
    "MEDIA_TYPE", "PolitenessLimiter", "QueryResult", "SparqlClient", "Term",
    "detect_capabilities", "execute", "execute_template", "parse", "serialize",
]

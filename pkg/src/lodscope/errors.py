"""Exception hierarchy shared by all lodscope modules."""

from __future__ import annotations


class LodscopeError(Exception):
    """Base class for every error raised by lodscope."""

    module = "lodscope"


# sparql-client

class SparqlError(LodscopeError):
    module = "sparql"


class NetworkUnreachable(SparqlError):
    pass


class ProbeAmbiguous(SparqlError):
    pass


class QueryTimeout(SparqlError):
    pass


class MalformedResponse(SparqlError):
    pass


class EndpointError(SparqlError):
    def __init__(self, status: int, body: str = ""):
        self.status = status
        self.body = body[:300]
        super().__init__(f"HTTP {status}: {self.body}")


class MissingParam(SparqlError):
    pass


class UnsupportedTemplate(SparqlError):
    pass


# endpoint-simulator

class SimulatorError(LodscopeError):
    module = "simulator"


class PortInUse(SimulatorError):
    pass


class ParseError(LodscopeError):
    """Malformed line in a line-based input file."""

    module = "parse"

    def __init__(self, line: int, message: str = ""):
        self.line = line
        super().__init__(f"line {line}: {message}" if message else f"line {line}")


# schema-extractor

class EndpointUnusable(LodscopeError):
    module = "extract"


# embedding-similarity

class EmbeddingError(LodscopeError):
    module = "embedding"


class DimensionMismatch(EmbeddingError):
    def __init__(self, line: int, expected: int, found: int):
        self.line = line
        super().__init__(f"line {line}: expected dimension {expected}, found {found}")


class EmptyLabel(EmbeddingError):
    pass


class ZeroVector(EmbeddingError):
    pass


# reuse-analyzer

class DegenerateNetwork(LodscopeError):
    module = "reuse"


# cli

class ConfigError(LodscopeError):
    module = "config"

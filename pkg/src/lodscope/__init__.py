"""Schema profiling for linked-data SPARQL endpoints."""

__version__ = "0.1.0"

"""Word-vector embeddings of schema-element labels and the similarity network.

A label is embedded as the idf-weighted mean of its word vectors.  Schema
elements from different sources whose embeddings are close (cosine at or
above a threshold) are linked, keeping at most one partner per node for
each pair of sources.
"""

from __future__ import annotations

import logging
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import DimensionMismatch, EmptyLabel, ParseError, ZeroVector
from .io import atomic_write_text, graphml_text
from .uris import LabeledUri

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.75
_PUNCT = str.maketrans({c: " " for c in string.punctuation})


def tokenize(label: str) -> list[str]:
    """Lowercase, replace punctuation by spaces, split on whitespace."""
    return label.lower().translate(_PUNCT).split()


@dataclass
class EmbeddingTable:
    words: list[str]
    vectors: np.ndarray                 # shape (len(words), dimension)
    idf: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise ValueError("vectors must be a (words x dimension) matrix")
        self.index = {w: i for i, w in enumerate(self.words)}
        if any(v <= 0 for v in self.idf.values()):
            raise ValueError("idf values must be positive")
        self.default_vector = (self.vectors.mean(axis=0) if len(self.words)
                               else np.zeros(self.vectors.shape[1]))
        self.default_idf = max(self.idf.values()) if self.idf else 1.0

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        i = self.index.get(word)
        return self.vectors[i] if i is not None else self.default_vector

    def weight(self, word: str) -> float:
        # words listed in the idf file keep their idf even without a vector
        return self.idf.get(word, self.default_idf)


def _read_vectors(path: Path) -> tuple[list[str], np.ndarray]:
    words, rows, dim = [], [], None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue  # word2vec "count dimension" header
            if len(parts) < 2:
                raise ParseError(lineno, "expected a word followed by numbers")
            try:
                values = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise DimensionMismatch(lineno, dim, len(values))
            words.append(parts[0])
            rows.append(values)
    return words, np.array(rows, dtype=float).reshape(len(rows), dim or 0)


def _read_idf(path: Path) -> dict[str, float]:
    idf = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'word idf'")
            try:
                value = float(parts[1])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            if not value > 0:
                raise ParseError(lineno, "idf must be positive")
            idf[parts[0]] = value
    return idf


def load_embeddings(vectors_path: str | Path, idf_path: str | Path | None = None) -> EmbeddingTable:
    """Load a text vector file and an optional ``word idf`` file."""
    words, vectors = _read_vectors(Path(vectors_path))
    idf = _read_idf(Path(idf_path)) if idf_path else {}
    return EmbeddingTable(words, vectors, idf)


def embed_label(label: str, table: EmbeddingTable) -> np.ndarray:
    counts = Counter(tokenize(label))
    if not counts:
        raise EmptyLabel(f"no tokens in label {label!r}")
    # iterate in sorted order so that the result does not depend on word order
    tokens = sorted(counts)
    weights = np.array([table.weight(t) * counts[t] for t in tokens])
    weights = weights / weights.sum()
    if len(tokens) == 1:
        return table.vector(tokens[0]).copy()
    return weights @ np.vstack([table.vector(t) for t in tokens])


def embed_uri(labeled: LabeledUri | str, table: EmbeddingTable) -> np.ndarray:
    label = labeled.label if isinstance(labeled, LabeledUri) else labeled
    return embed_label(label, table)


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine of a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


# -- similarity network -----------------------------------------------------------

@dataclass
class SimilarityNetwork:
    nodes: list[LabeledUri]
    edges: dict[tuple[str, str], float]   # (uri_a, uri_b) with uri_a < uri_b
    threshold: float

    def __post_init__(self):
        self.by_uri = {n.uri: n for n in self.nodes}

    def uris(self) -> list[str]:
        return [n.uri for n in self.nodes]

    def weighted_edges(self) -> list[tuple[str, str, float]]:
        return [(a, b, w) for (a, b), w in sorted(self.edges.items())]

    def to_networkx(self, communities: dict[str, int] | None = None) -> nx.Graph:
        g = nx.Graph()
        for n in self.nodes:
            attrs = {"label": n.label, "source": n.source or "", "method": n.method}
            if communities is not None:
                attrs["community"] = communities[n.uri]
            g.add_node(n.uri, **attrs)
        for a, b, w in self.weighted_edges():
            g.add_edge(a, b, weight=w)
        return g


def _collapse(labeled: Iterable[LabeledUri]) -> list[LabeledUri]:
    # a URI used by several sources becomes one node owned by the first source id
    best: dict[str, LabeledUri] = {}
    for item in labeled:
        cur = best.get(item.uri)
        if cur is None or (item.source or "") < (cur.source or ""):
            best[item.uri] = item
    return [best[u] for u in sorted(best)]


def similarity_scores(nodes: Sequence[LabeledUri], table: EmbeddingTable) -> np.ndarray:
    """Pairwise cosine matrix; rows whose embedding is zero score 0 everywhere."""
    if not nodes:
        return np.zeros((0, 0))
    emb = np.vstack([embed_uri(n, table) for n in nodes])
    norms = np.linalg.norm(emb, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = emb / safe[:, None]
    unit[norms == 0] = 0.0
    return np.clip(unit @ unit.T, -1.0, 1.0)


def build_similarity_network(labeled: Iterable[LabeledUri], table: EmbeddingTable,
                             threshold: float = DEFAULT_THRESHOLD) -> SimilarityNetwork:
    """Link cross-source pairs scoring at least ``threshold``, one partner per source pair.

    For each pair of sources candidates are taken greedily by descending
    score (ties by URI order); a pair is skipped when either node already has
    a partner from the other source.
    """
    nodes = _collapse(labeled)
    scores = similarity_scores(nodes, table)
    candidates = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if nodes[i].source == nodes[j].source:
                continue
            s = float(scores[i, j])
            if s >= threshold:
                candidates.append((-s, nodes[i].uri, nodes[j].uri, i, j))
    candidates.sort()
    matched: set[tuple[str, str]] = set()  # (uri, source of its partner)
    edges = {}
    for neg, ua, ub, i, j in candidates:
        sa, sb = nodes[i].source or "", nodes[j].source or ""
        if (ua, sb) in matched or (ub, sa) in matched:
            continue
        matched.add((ua, sb))
        matched.add((ub, sa))
        edges[(ua, ub)] = -neg
    return SimilarityNetwork(nodes, dict(sorted(edges.items())), threshold)


def export_similarity_graphml(network: SimilarityNetwork, path: str | Path,
                              communities: dict[str, int] | None = None) -> Path:
    return atomic_write_text(path, graphml_text(network.to_networkx(communities)))

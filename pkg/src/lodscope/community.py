"""Louvain community detection on weighted undirected graphs, plus reports.

Modularity uses the adjacency-matrix convention: ``2m`` is the sum of all
``A_ij`` (each undirected edge counted twice, a self-loop of an aggregated
node holding its internal weight counted twice as well).
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from .embedding import SimilarityNetwork, tokenize
from .io import write_tsv
from .uris import LabeledUri

MIN_GAIN = 1e-9
STOP_WORDS = frozenset({"has", "of", "the", "is", "a", "an", "in", "for", "to", "by", "with", "and", "or"})
SIZE_FLOOR = 2
RESTARTS = 8
PERTURBATIONS = 16


def modularity(nodes: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable, float]],
               membership: Mapping[Hashable, int]) -> float:
    """Q = (1/2m) * sum over communities of (Sigma_in - Sigma_tot^2 / 2m)."""
    inside: dict[int, float] = defaultdict(float)
    total: dict[int, float] = defaultdict(float)
    two_m = 0.0
    for a, b, w in edges:
        two_m += 2 * w
        total[membership[a]] += w
        total[membership[b]] += w
        if membership[a] == membership[b]:
            inside[membership[a]] += 2 * w
    if two_m == 0:
        return 0.0
    return sum(inside[c] - total[c] ** 2 / two_m for c in total) / two_m


class _Level:
    """One graph in the aggregation hierarchy (nodes are 0..n-1)."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[dict[int, float]] = [dict() for _ in range(n)]
        self.loop = [0.0] * n  # A_ii

    def add(self, i: int, j: int, w: float) -> None:
        if i == j:
            self.loop[i] += 2 * w
        else:
            self.adj[i][j] = self.adj[i].get(j, 0.0) + w
            self.adj[j][i] = self.adj[j].get(i, 0.0) + w

    def degree(self, i: int) -> float:
        return self.loop[i] + sum(self.adj[i].values())

    def two_m(self) -> float:
        return sum(self.degree(i) for i in range(self.n))

    def modularity(self, comm: list[int]) -> float:
        two_m = self.two_m()
        if two_m == 0:
            return 0.0
        inside: dict[int, float] = defaultdict(float)
        total: dict[int, float] = defaultdict(float)
        for i in range(self.n):
            c = comm[i]
            total[c] += self.degree(i)
            inside[c] += self.loop[i]
            for j, w in self.adj[i].items():
                if comm[j] == c:
                    inside[c] += w
        return sum(inside[c] - total[c] ** 2 / two_m for c in total) / two_m


def _local_moving(level: _Level, rng: random.Random,
                  start: list[int] | None = None) -> tuple[list[int], bool]:
    """Move single nodes to the neighbouring (or an empty) community with best gain."""
    comm = list(start) if start is not None else list(range(level.n))
    degree = [level.degree(i) for i in range(level.n)]
    tot: dict[int, float] = defaultdict(float)
    for i, c in enumerate(comm):
        tot[c] += degree[i]
    two_m = sum(degree)
    moved_any = False
    if two_m == 0:
        return comm, False
    fresh = max(comm, default=-1) + 1
    improved = True
    while improved:
        improved = False
        order = list(range(level.n))
        rng.shuffle(order)
        for i in order:
            ci = comm[i]
            links: dict[int, float] = defaultdict(float)
            for j, w in level.adj[i].items():
                links[comm[j]] += w
            tot[ci] -= degree[i]
            best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * degree[i] / two_m
            for c in sorted(links):
                gain = links[c] - tot[c] * degree[i] / two_m
                if gain > best_gain + MIN_GAIN * two_m:
                    best, best_gain = c, gain
            if tot[ci] > 0 and best_gain < -MIN_GAIN * two_m:
                best, fresh = fresh, fresh + 1  # isolating the node beats every neighbour
            tot[best] += degree[i]
            if best != ci:
                comm[i] = best
                improved = moved_any = True
    # relabel to 0..k-1 in order of first appearance
    relabel: dict[int, int] = {}
    return [relabel.setdefault(c, len(relabel)) for c in comm], moved_any


def _aggregate(level: _Level, comm: list[int]) -> _Level:
    out = _Level(max(comm) + 1 if comm else 0)
    for i in range(level.n):
        out.loop[comm[i]] += level.loop[i]
        for j, w in level.adj[i].items():
            if i < j:
                if comm[i] == comm[j]:
                    out.loop[comm[i]] += 2 * w
                else:
                    out.add(comm[i], comm[j], w)
    return out


@dataclass
class CommunityAssignment:
    membership: dict[Hashable, int]
    modularity: float
    history: list[float] = field(default_factory=list)

    def communities(self) -> dict[int, list]:
        out: dict[int, list] = defaultdict(list)
        for node, c in self.membership.items():
            out[c].append(node)
        return {c: sorted(m, key=str) for c, m in sorted(out.items())}


def _louvain_once(base: _Level, rng: random.Random,
                  start: list[int] | None = None) -> tuple[list[int], list[float]]:
    assignment = list(range(base.n))  # base node -> current-level node
    level = base
    q = base.modularity(assignment)
    history = [q]
    if start is not None:
        assignment, _ = _local_moving(base, rng, start=start)
        level = _aggregate(base, assignment)
        q = base.modularity(assignment)
        history = [q]
    while True:
        comm, moved = _local_moving(level, rng)
        if moved and level.modularity(comm) - q >= MIN_GAIN:
            q = level.modularity(comm)
            assignment = [comm[a] for a in assignment]
            level = _aggregate(level, comm)
            history.append(q)
            continue
        # no gain at the coarse level: try single-node moves on the base graph
        refined, moved = _local_moving(base, rng, start=assignment)
        if moved and base.modularity(refined) - q >= MIN_GAIN:
            q = base.modularity(refined)
            assignment = refined
            level = _aggregate(base, refined)
            history.append(q)
            continue
        return assignment, history


def louvain(nodes: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable, float]],
            seed: int = 0, restarts: int = RESTARTS) -> CommunityAssignment:
    """Two-phase Louvain: local moving, then aggregation, until Q stops rising.

    When the coarse levels stall, single nodes are moved once more on the
    original graph and aggregation resumes if that helped.  The whole search
    is repeated ``restarts`` times with visit orders derived from ``seed``;
    the highest modularity wins (earliest run on ties).  Community ids are
    renumbered by decreasing size, ties by smallest member.
    """
    nodes = sorted(set(nodes), key=str)
    index = {n: i for i, n in enumerate(nodes)}
    base = _Level(len(nodes))
    edge_list = []
    for a, b, w in edges:
        if w < 0:
            raise ValueError("edge weights must be non-negative")
        base.add(index[a], index[b], w)
        edge_list.append((a, b, w))
    best = None
    for run in range(max(1, restarts)):
        rng = random.Random(f"{seed}|{run}")
        assignment, history = _louvain_once(base, rng)
        if best is None or history[-1] > best[1][-1] + MIN_GAIN:
            best = (assignment, history)
    for run in range(PERTURBATIONS if base.n > 1 else 0):
        rng = random.Random(f"{seed}|kick|{run}")
        start = list(best[0])
        fresh = max(start) + 1
        for i in rng.sample(range(base.n), min(base.n, 2)):
            start[i] = rng.choice(sorted(set(start)) + [fresh])
        relabel: dict[int, int] = {}
        start = [relabel.setdefault(c, len(relabel)) for c in start]
        assignment, history = _louvain_once(base, rng, start)
        if history[-1] > best[1][-1] + MIN_GAIN:
            best = (assignment, best[1] + history[-1:])
    assignment, history = best
    groups: dict[int, list] = defaultdict(list)
    for n, c in zip(nodes, assignment):
        groups[c].append(n)
    ranked = sorted(groups.values(), key=lambda g: (-len(g), str(min(g, key=str))))
    membership = {n: cid for cid, g in enumerate(ranked) for n in g}
    return CommunityAssignment(membership, modularity(nodes, edge_list, membership), history)


def detect_communities(network: SimilarityNetwork, seed: int = 0) -> CommunityAssignment:
    return louvain(network.uris(), network.weighted_edges(), seed)


# -- reports ---------------------------------------------------------------------------

@dataclass
class CommunityRow:
    community_id: str
    size: int
    tokens: Counter

    def top(self, n: int = 5) -> list[tuple[str, int]]:
        ranked = sorted(self.tokens.items(), key=lambda kv: (-kv[1], kv[0]))
        return [(w.capitalize(), k) for w, k in ranked[:n]]


def label_tokens(label: str) -> list[str]:
    return [t for t in tokenize(label) if t not in STOP_WORDS]


def community_report(assignment: CommunityAssignment, labeled: Iterable[LabeledUri],
                     size_floor: int = SIZE_FLOOR) -> list[CommunityRow]:
    """Member count and label-token frequencies per community.

    Communities smaller than ``size_floor`` are pooled into one row with id
    ``"small"``.
    """
    labels = {item.uri: item.label for item in labeled}
    rows, small = [], CommunityRow("small", 0, Counter())
    for cid, members in assignment.communities().items():
        tokens = Counter(t for m in members for t in label_tokens(labels.get(m, str(m))))
        if len(members) >= size_floor:
            rows.append(CommunityRow(str(cid), len(members), tokens))
        else:
            small.size += len(members)
            small.tokens.update(tokens)
    if small.size:
        rows.append(small)
    return rows


def write_community_report(rows: list[CommunityRow], path: str | Path, top: int = 5) -> Path:
    return write_tsv(path, ["community_id", "size", "top_tokens"],
                     [(r.community_id, r.size, ", ".join(f"{w} ({k})" for w, k in r.top(top)))
                      for r in rows])


def write_membership(assignment: CommunityAssignment, labeled: Iterable[LabeledUri],
                     path: str | Path) -> Path:
    info = {item.uri: item for item in labeled}
    rows = []
    for node, cid in sorted(assignment.membership.items(), key=lambda kv: (kv[1], str(kv[0]))):
        item = info.get(node)
        rows.append((cid, node, item.source if item else "", item.label if item else ""))
    return write_tsv(path, ["community_id", "uri", "source", "label"], rows)

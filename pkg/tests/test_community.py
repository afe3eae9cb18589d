from __future__ import annotations

import random
from collections import Counter

import networkx as nx
import pytest

from lodscope.community import (
    CommunityAssignment,
    community_report,
    detect_communities,
    label_tokens,
    louvain,
    modularity,
    write_community_report,
    write_membership,
)
from lodscope.embedding import SimilarityNetwork
from lodscope.uris import LabeledUri


def partitions(n: int):
    """All set partitions of range(n) as restricted growth strings."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for c in range(top + 2):
            yield from grow(prefix + [c], max(top, c))
    yield from grow([], -1)


def optimum(nodes, edges) -> float:
    return max(modularity(nodes, edges, dict(zip(nodes, p))) for p in partitions(len(nodes)))


def random_connected_graph(seed: int, max_nodes: int = 8):
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    edges = [(a, b, rng.uniform(0.1, 1.0)) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.5]
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from((a, b) for a, b, _ in edges)
    return list(range(n)), edges, nx.is_connected(g)


TRIANGLES = [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0),
             ("d", "e", 1.0), ("e", "f", 1.0), ("d", "f", 1.0)]


def test_partition_enumeration_counts_bell_numbers():
    assert [sum(1 for _ in partitions(n)) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


def test_two_triangles():
    result = louvain("abcdef", TRIANGLES)
    assert result.modularity == 0.5
    assert sorted(result.communities().values()) == [["a", "b", "c"], ["d", "e", "f"]]
    assert optimum(list("abcdef"), TRIANGLES) == pytest.approx(0.5, abs=1e-15)


def test_single_edge():
    result = louvain("ab", [("a", "b", 1.0)])
    assert result.membership == {"a": 0, "b": 0}
    assert result.modularity == 0.0


def test_edgeless_nodes_are_singletons():
    result = louvain(range(5), [])
    assert sorted(result.membership.values()) == [0, 1, 2, 3, 4]
    assert result.modularity == 0.0


def test_modularity_agrees_with_networkx():
    rng = random.Random(3)
    for seed in range(30):
        nodes, edges, _ = random_connected_graph(seed)
        if not edges:
            continue
        membership = {n: rng.randrange(3) for n in nodes}
        g = nx.Graph()
        g.add_nodes_from(nodes)
        g.add_weighted_edges_from(edges)
        groups = [{n for n in nodes if membership[n] == c} for c in set(membership.values())]
        assert modularity(nodes, edges, membership) == pytest.approx(nx.community.modularity(g, groups), abs=1e-12)


def test_near_optimal_on_small_random_graphs():
    checked = 0
    for seed in range(200):
        nodes, edges, connected = random_connected_graph(seed)
        if not connected:
            continue
        result = louvain(nodes, edges, seed=seed)
        best = optimum(nodes, edges)
        assert result.modularity >= 0.95 * best - 1e-12, (seed, result.modularity, best)
        checked += 1
    assert checked >= 50


def test_returned_q_matches_recomputation_and_history_rises():
    for seed in range(40):
        nodes, edges, _ = random_connected_graph(seed, max_nodes=30)
        result = louvain(nodes, edges, seed=seed)
        assert abs(result.modularity - modularity(nodes, edges, result.membership)) <= 1e-9
        assert all(b >= a - 1e-12 for a, b in zip(result.history, result.history[1:]))
        assert -0.5 <= result.modularity <= 1
        assert set(result.membership) == set(nodes)


def test_same_seed_same_assignment():
    nodes, edges, _ = random_connected_graph(17, max_nodes=40)
    assert louvain(nodes, edges, seed=9) == louvain(nodes, edges, seed=9)


def test_community_ids_rank_by_size():
    result = louvain("abcdefgh", TRIANGLES[:3] + [("g", "h", 1.0)])
    assert result.communities() == {0: ["a", "b", "c"], 1: ["g", "h"], 2: ["d"], 3: ["e"], 4: ["f"]}


def test_negative_weights_are_rejected():
    with pytest.raises(ValueError):
        louvain("ab", [("a", "b", -1.0)])


def test_detect_on_similarity_network():
    nodes = [LabeledUri(f"http://x/{c}", c, "regexp", "s" if c in "ace" else "t") for c in "abcdef"]
    net = SimilarityNetwork(nodes, {("http://x/a", "http://x/b"): 0.9, ("http://x/c", "http://x/d"): 0.8}, 0.75)
    result = detect_communities(net)
    assert result.membership["http://x/a"] == result.membership["http://x/b"]
    assert result.membership["http://x/a"] != result.membership["http://x/c"]


# -- reports -------------------------------------------------------------------------

ENZYME = [LabeledUri("http://x/1", "Ec Code", "regexp", "kegg"),
          LabeledUri("http://x/2", "Ec Number", "regexp", "drugbank"),
          LabeledUri("http://x/3", "Has Ec Number", "regexp", "mold"),
          LabeledUri("http://x/4", "Gene Id", "regexp", "kegg")]


def enzyme_assignment() -> CommunityAssignment:
    return CommunityAssignment({"http://x/1": 0, "http://x/2": 0, "http://x/3": 0, "http://x/4": 1}, 0.0)


def test_enzyme_community_tokens():
    rows = community_report(enzyme_assignment(), ENZYME)
    top = dict(rows[0].top())
    assert set(top) == {"Ec", "Number", "Code"}
    assert top == {"Ec": 3, "Number": 2, "Code": 1}


def test_singleton_community_keeps_its_tokens():
    rows = community_report(enzyme_assignment(), ENZYME, size_floor=1)
    assert (rows[1].size, dict(rows[1].tokens)) == (1, {"gene": 1, "id": 1})
    small = community_report(enzyme_assignment(), ENZYME)[-1]
    assert (small.community_id, small.size) == ("small", 1)


def test_token_accounting():
    rows = community_report(enzyme_assignment(), ENZYME)
    total = Counter(t for item in ENZYME for t in label_tokens(item.label))
    assert sum((r.tokens for r in rows), Counter()) == total
    assert sum(r.size for r in rows) == len(ENZYME)


def test_report_files(tmp_path):
    rows = community_report(enzyme_assignment(), ENZYME)
    lines = write_community_report(rows, tmp_path / "c.tsv").read_text().splitlines()
    assert lines == ["community_id\tsize\ttop_tokens", "0\t3\tEc (3), Number (2), Code (1)",
                     "small\t1\tGene (1), Id (1)"]
    members = write_membership(enzyme_assignment(), ENZYME, tmp_path / "m.tsv").read_text().splitlines()
    assert members[1] == "0\thttp://x/1\tkegg\tEc Code"

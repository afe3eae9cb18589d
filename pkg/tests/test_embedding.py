from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lodscope.embedding import (
    EmbeddingTable,
    build_similarity_network,
    cosine,
    embed_label,
    embed_uri,
    export_similarity_graphml,
    load_embeddings,
    tokenize,
)
from lodscope.errors import DimensionMismatch, EmptyLabel, ParseError, ZeroVector
from lodscope.uris import LabeledUri, extract_label

from .conftest import CLOUD


def table(vectors: dict[str, tuple], idf: dict[str, float] | None = None) -> EmbeddingTable:
    return EmbeddingTable(list(vectors), np.array(list(vectors.values()), dtype=float), idf or {})


def node(uri: str, label: str, source: str) -> LabeledUri:
    return LabeledUri(uri, label, "regexp", source)


# -- loading ---------------------------------------------------------------------------

def test_two_word_three_dim_file(tmp_path):
    (tmp_path / "v.txt").write_text("mol 1 0 0\nweight 0 1 0.5\n")
    t = load_embeddings(tmp_path / "v.txt")
    assert (len(t), t.dimension) == (2, 3)
    assert t.vector("weight").tolist() == [0.0, 1.0, 0.5]


def test_word2vec_header_is_skipped(tmp_path):
    (tmp_path / "v.txt").write_text("2 2\na 1 0\nb 0 1\n")
    assert len(load_embeddings(tmp_path / "v.txt")) == 2


def test_mixed_dimensions_are_rejected(tmp_path):
    (tmp_path / "v.txt").write_text("a 1 2 3\nb 1 2 3 4\n")
    with pytest.raises(DimensionMismatch):
        load_embeddings(tmp_path / "v.txt")


@pytest.mark.parametrize("vectors,idf", [("a 1 x\n", ""), ("a 1\n", "a\n"), ("a 1\n", "a 0\n"),
                                         ("a 1\n", "a -2\n")])
def test_malformed_files(tmp_path, vectors, idf):
    (tmp_path / "v.txt").write_text(vectors)
    (tmp_path / "i.txt").write_text(idf)
    with pytest.raises(ParseError):
        load_embeddings(tmp_path / "v.txt", tmp_path / "i.txt")


def test_default_vector_is_the_mean():
    assert table({"a": (1, 0), "b": (0, 1)}).default_vector.tolist() == [0.5, 0.5]


def test_default_idf_is_the_maximum():
    t = table({"a": (1, 0)}, {"a": 1.0, "b": 4.0})
    assert t.weight("zzz") == 4.0 and t.weight("b") == 4.0


def test_bundled_table_loads():
    t = load_embeddings(CLOUD / "vectors.txt", CLOUD / "idf.txt")
    assert t.dimension == 100 and len(t) == 98


# -- label embeddings --------------------------------------------------------------------

def test_single_word_is_its_vector():
    t = table({"weight": (0.3, -1.25, 7.0), "mol": (1, 0, 0)})
    assert embed_label("Weight", t).tolist() == [0.3, -1.25, 7.0]


def test_equal_idf_gives_midpoint():
    t = table({"a": (1, 0), "b": (0, 1)}, {"a": 2.0, "b": 2.0})
    assert embed_label("a b", t) == pytest.approx([0.5, 0.5], abs=1e-15)


def test_idf_one_and_three():
    t = table({"a": (1, 0), "b": (0, 1)}, {"a": 1.0, "b": 3.0})
    assert embed_label("a b", t) == pytest.approx([0.25, 0.75], abs=1e-15)


def test_out_of_vocabulary_word_uses_defaults():
    t = table({"a": (1, 0), "b": (0, 1)}, {"a": 1.0, "b": 3.0})
    # "differn" gets the mean vector (0.5, 0.5) and the max idf 3
    assert embed_label("a differn", t) == pytest.approx([0.25 * 1 + 0.75 * 0.5, 0.75 * 0.5])


def test_empty_label():
    with pytest.raises(EmptyLabel):
        embed_label(" -- ", table({"a": (1, 0)}))


def test_tokenize():
    assert tokenize("Has Molecular-Weight (avg)") == ["has", "molecular", "weight", "avg"]


def test_embed_uri_uses_the_label():
    t = table({"mol": (1, 0), "weight": (0, 1)})
    assert embed_uri(node("http://x/mw", "Mol Weight", "s"), t).tolist() == embed_label("mol weight", t).tolist()


_words = st.sampled_from(["mol", "weight", "ec", "number", "gene", "unknownword"])


@settings(max_examples=200)
@given(st.lists(_words, min_size=1, max_size=6), st.randoms())
def test_embedding_ignores_token_order(words, rnd):
    t = load_embeddings(CLOUD / "vectors.txt", CLOUD / "idf.txt")
    shuffled = list(words)
    rnd.shuffle(shuffled)
    assert embed_label(" ".join(words), t).tolist() == embed_label(" ".join(shuffled), t).tolist()


# -- cosine ---------------------------------------------------------------------------------

def test_cosine_examples():
    assert cosine((3, 4), (3, 4)) == pytest.approx(1.0, abs=1e-15)
    assert cosine((1, 0), (0, 1)) == 0.0
    assert cosine((1, 1), (1, 0)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert round(cosine((1, 1), (1, 0)), 5) == 0.70711


def test_cosine_errors():
    with pytest.raises(ZeroVector):
        cosine((0, 0), (1, 0))
    with pytest.raises(ValueError):
        cosine((1, 0), (1, 0, 0))


def test_cosine_symmetry_and_bound_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        dim = int(rng.integers(1, 20))
        a, b = rng.normal(size=dim), rng.normal(size=dim)
        assert abs(cosine(a, b) - cosine(b, a)) <= 1e-12
        assert abs(cosine(a, b)) <= 1 + 1e-12


# -- similarity network ---------------------------------------------------------------------

def unit(score: float) -> tuple[float, float]:
    return (score, math.sqrt(1 - score * score))


def test_one_partner_per_source_pair():
    t = table({"three": (1.0, 0.0), "one": unit(0.87), "two": unit(0.93)})
    nodes = [node("http://x/n1", "one", "LD1"), node("http://x/n2", "two", "LD1"),
             node("http://x/n3", "three", "LD2")]
    net = build_similarity_network(nodes, t)
    assert list(net.edges) == [("http://x/n2", "http://x/n3")]
    assert net.edges[("http://x/n2", "http://x/n3")] == pytest.approx(0.93)


def test_below_threshold_gives_no_edges():
    t = table({"a": (1.0, 0.0), "b": unit(0.7), "c": (0.0, 1.0)})
    nodes = [node("http://x/a", "a", "s1"), node("http://x/b", "b", "s2"), node("http://x/c", "c", "s3")]
    net = build_similarity_network(nodes, t)
    assert net.edges == {} and len(net.nodes) == 3


def test_threshold_is_inclusive():
    t = table({"a": (1.0, 0.0), "b": unit(0.75)})
    nodes = [node("http://x/a", "a", "s1"), node("http://x/b", "b", "s2")]
    assert len(build_similarity_network(nodes, t, threshold=cosine((1, 0), unit(0.75))).edges) == 1


def test_same_source_pairs_are_never_linked():
    t = table({"a": (1.0, 0.0)})
    nodes = [node("http://x/a1", "a", "s"), node("http://x/a2", "a", "s")]
    assert build_similarity_network(nodes, t).edges == {}


def test_molecular_weight_synonyms_form_a_triangle():
    t = load_embeddings(CLOUD / "vectors.txt", CLOUD / "idf.txt")
    uris = {"drugbank": "http://bio2rdf.org/drugbank_vocabulary:molecular-weight",
            "kegg": "http://bio2rdf.org/kegg_vocabulary:mol_weight",
            "mold": "http://mold.example.org/vocab/hasMolecularWeight"}
    nodes = [extract_label(u, source=s) for s, u in uris.items()]
    net = build_similarity_network(nodes, t)
    assert set(net.edges) == {tuple(sorted(p)) for p in itertools.combinations(uris.values(), 2)}
    assert all(w >= 0.75 for w in net.edges.values())


def random_labeled(rng: random.Random) -> tuple[list[LabeledUri], EmbeddingTable]:
    words = [f"w{i}" for i in range(6)]
    vecs = {w: tuple(rng.uniform(-0.2, 1) for _ in range(3)) for w in words}
    nodes = [node(f"http://x/{i}", " ".join(rng.sample(words, rng.randint(1, 2))), rng.choice("ABC"))
             for i in range(rng.randint(2, 14))]
    return nodes, table(vecs)


def test_network_invariants_on_random_inputs(tmp_path):
    rng = random.Random(11)
    for _ in range(200):
        nodes, t = random_labeled(rng)
        threshold = rng.choice([0.5, 0.75, 0.9])
        net = build_similarity_network(nodes, t, threshold)
        source = {n.uri: n.source for n in net.nodes}
        partners = defaultdict(int)
        for (a, b), w in net.edges.items():
            assert a < b and w >= threshold and source[a] != source[b]
            partners[(a, source[b])] += 1
            partners[(b, source[a])] += 1
        assert all(k <= 1 for k in partners.values())
    g = export_similarity_graphml(net, tmp_path / "s.graphml").read_text()
    assert g.count("<edge ") == len(net.edges)


def test_shared_uri_is_one_node_owned_by_smallest_source():
    t = table({"a": (1.0, 0.0)})
    net = build_similarity_network([node("http://x/a", "a", "zeta"), node("http://x/a", "a", "alpha")], t)
    assert [(n.uri, n.source) for n in net.nodes] == [("http://x/a", "alpha")]

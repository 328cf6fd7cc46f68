import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sciatlas.citegraph import (
    GraphError,
    WeightedGraph,
    aggregate_graph,
    build_normalized_graph,
    dump_graph,
    restore_graph,
)
from sciatlas.corpus import CitationEdge, Corpus, PublicationRecord

from oracles import make_graph


def corpus_of(edges, extra_pubs=()):
    ids = {e[0] for e in edges} | {e[1] for e in edges} | set(extra_pubs)
    pubs = {i: PublicationRecord(pub_id=i, year=2010) for i in sorted(ids)}
    citations = [CitationEdge(a, b) for a, b in edges]
    return Corpus(publications=pubs, citations=citations)


class TestBuildNormalizedGraph:
    def test_weight_formula(self):
        # i cites/cited-by 2 pubs, j relates to 4: w = (1/2 + 1/4) / 2
        edges = [("i", "j"), ("i", "x1"),
                 ("j", "x1"), ("j", "x2"), ("j", "x3")]
        g = build_normalized_graph(corpus_of(edges))
        i, j = g.index_of("i"), g.index_of("j")
        w = g.edges[(min(i, j), max(i, j))]
        assert w == pytest.approx((0.5 + 0.25) / 2)

    def test_isolated_node_retained(self):
        g = build_normalized_graph(corpus_of([("a", "b")], extra_pubs=["lonely"]))
        assert "lonely" in g.nodes
        assert g.degrees()[g.index_of("lonely")] == 0

    def test_triangle_all_half(self):
        g = build_normalized_graph(corpus_of([("a", "b"), ("b", "c"), ("c", "a")]))
        assert all(w == pytest.approx(0.5) for w in g.edges.values())

    def test_reciprocal_citations_single_edge(self):
        g = build_normalized_graph(corpus_of([("a", "b"), ("b", "a")]))
        assert g.n_edges == 1
        # both relate to exactly one publication
        assert list(g.edges.values())[0] == pytest.approx(1.0)

    def test_empty_corpus(self):
        g = build_normalized_graph(Corpus())
        assert g.n_nodes == 0 and g.n_edges == 0

    def test_node_weight_one(self):
        g = build_normalized_graph(corpus_of([("a", "b")]))
        assert g.node_weights == [1.0, 1.0]

    def test_per_node_out_mass(self):
        # On a closed corpus every node's sum of 1/k_i contributions is 1,
        # i.e. sum over incident edges of 1/k_i equals 1.
        edges = [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "a")]
        g = build_normalized_graph(corpus_of(edges))
        deg = g.degrees()
        for i in range(g.n_nodes):
            mass = sum(1.0 / deg[i] for (u, v) in g.edges if i in (u, v))
            assert mass == pytest.approx(1.0)


class TestAggregateGraph:
    def test_singleton_clusters_preserve(self):
        g = make_graph(2, [(0, 1, 0.4)])
        meta = aggregate_graph(g, {0: 0, 1: 1})
        assert meta.edges == {(0, 1): pytest.approx(0.4)}

    def test_pair_average(self):
        # clusters of sizes 2 and 3, total cross weight 1.2 -> 1.2 / 6
        edges = [(0, 2, 0.5), (1, 3, 0.4), (1, 4, 0.3)]
        g = make_graph(5, edges)
        meta = aggregate_graph(g, {0: 0, 1: 0, 2: 1, 3: 1, 4: 1})
        assert meta.edges[(0, 1)] == pytest.approx(1.2 / 6)

    def test_no_cross_edges_no_meta_edge(self):
        g = make_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        meta = aggregate_graph(g, {0: 0, 1: 0, 2: 1, 3: 1})
        assert meta.edges == {}

    def test_missing_node_error(self):
        g = make_graph(2, [(0, 1, 1.0)])
        with pytest.raises(GraphError, match="1"):
            aggregate_graph(g, {0: 0})

    def test_identity_partition_isomorphic(self):
        g = make_graph(4, [(0, 1, 0.3), (1, 2, 0.7), (2, 3, 0.2)],
                       node_weights=[1, 2, 3, 4])
        meta = aggregate_graph(g, {n: n for n in g.nodes})
        assert meta.node_weights == g.node_weights
        assert meta.edges == g.edges

    def test_node_weight_conserved(self):
        g = make_graph(5, [(0, 1, 1.0), (2, 3, 0.5)], node_weights=[1, 2, 3, 4, 5])
        meta = aggregate_graph(g, {0: 0, 1: 0, 2: 1, 3: 2, 4: 2})
        assert sum(meta.node_weights) == pytest.approx(sum(g.node_weights))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000), st.integers(1, 4))
def test_aggregation_weight_conservation_property(n, seed, k):
    import random

    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.5:
                edges.append((u, v, rng.uniform(0.1, 2.0)))
    g = make_graph(n, edges, node_weights=[rng.randint(1, 5) for _ in range(n)])
    assignment = {i: rng.randrange(k) for i in range(n)}
    meta = aggregate_graph(g, assignment)
    assert sum(meta.node_weights) == pytest.approx(sum(g.node_weights))


class TestGraphValidation:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            WeightedGraph(nodes=[0, 1], node_weights=[1, 1], edges={(1, 1): 1.0})

    def test_rejects_negative_weight(self):
        with pytest.raises(GraphError):
            WeightedGraph(nodes=[0, 1], node_weights=[1, 1], edges={(0, 1): -1.0})

    def test_rejects_duplicate_nodes(self):
        with pytest.raises(GraphError):
            WeightedGraph(nodes=[0, 0], node_weights=[1, 1], edges={})


def test_dump_restore_roundtrip(tmp_path):
    g = make_graph(4, [(0, 1, 0.25), (2, 3, 0.75)], node_weights=[1, 2, 3, 4])
    path = tmp_path / "graph.jsonl"
    dump_graph(g, path)
    back = restore_graph(path)
    assert back.nodes == g.nodes
    assert back.node_weights == g.node_weights
    assert back.edges == g.edges

"""Degree-normalized citation networks and cluster-level aggregation.

The publication graph is undirected and simple. A publication's relation
count k is the number of distinct publications it cites or is cited by, and
an edge between i and j carries weight (1/k_i + 1/k_j) / 2, which keeps
per-node outgoing normalized mass at most 1 (exactly 1 on a closed corpus).

Cluster-level meta-graphs average the underlying edge weights over all node
pairs between two clusters, so large but sparsely linked cluster pairs get a
proportionally weaker relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .corpus import Corpus, pub_sort_key

NodeId = Hashable


class GraphError(Exception):
    pass


@dataclass
class WeightedGraph:
    """Undirected weighted graph with per-node weights.

    ``nodes`` fixes the node order; edges are keyed by index pairs (i, j)
    with i < j. Node weights are 1 for publication graphs and the member
    publication count for meta-graphs.
    """

    nodes: list[NodeId] = field(default_factory=list)
    node_weights: list[float] = field(default_factory=list)
    edges: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index = {n: i for i, n in enumerate(self.nodes)}
        if len(self._index) != len(self.nodes):
            raise GraphError("duplicate node ids")
        if len(self.node_weights) != len(self.nodes):
            raise GraphError("node_weights length mismatch")
        for (u, v), w in self.edges.items():
            if u == v:
                raise GraphError(f"self-loop at node index {u}")
            if not (0 <= u < v < len(self.nodes)):
                raise GraphError(f"bad edge index pair ({u}, {v})")
            if not (w >= 0.0 and w == w and w != float("inf")):
                raise GraphError(f"non-finite or negative edge weight on ({u}, {v})")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def index_of(self, node: NodeId) -> int:
        return self._index[node]

    def add_edge(self, i: int, j: int, weight: float) -> None:
        if i > j:
            i, j = j, i
        if i == j:
            raise GraphError("self-loop")
        self.edges[(i, j)] = self.edges.get((i, j), 0.0) + weight

    def sorted_edges(self) -> list[tuple[int, int, float]]:
        return [(u, v, w) for (u, v), w in sorted(self.edges.items())]

    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-node list of (neighbor index, weight), sorted by neighbor."""
        adj: list[list[tuple[int, float]]] = [[] for _ in self.nodes]
        for (u, v), w in sorted(self.edges.items()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        for row in adj:
            row.sort()
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n_nodes
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def total_edge_weight(self) -> float:
        return sum(self.edges.values())

    def total_node_weight(self) -> float:
        return sum(self.node_weights)


def build_normalized_graph(corpus: Corpus) -> WeightedGraph:
    """Build the undirected, degree-normalized publication graph.

    Every loaded publication becomes a node (isolated ones included) with
    node weight 1. An edge exists where at least one citation links the two
    publications in either direction.
    """
    nodes = sorted(corpus.publications, key=pub_sort_key)
    index = {n: i for i, n in enumerate(nodes)}

    pairs: set[tuple[int, int]] = set()
    for edge in corpus.citations:
        i, j = index[edge.citing], index[edge.cited]
        pairs.add((i, j) if i < j else (j, i))

    k = [0] * len(nodes)
    for i, j in pairs:
        k[i] += 1
        k[j] += 1

    edges = {
        (i, j): (1.0 / k[i] + 1.0 / k[j]) / 2.0
        for i, j in sorted(pairs)
    }
    return WeightedGraph(nodes=nodes, node_weights=[1.0] * len(nodes), edges=edges)


def aggregate_graph(graph: WeightedGraph, assignment: dict[NodeId, int]) -> WeightedGraph:
    """Aggregate ``graph`` into one meta-node per cluster.

    Meta-node weight is the summed member node weight; the meta-edge between
    clusters A and B is the total cross edge weight divided by |A|*|B| node
    pairs. Cluster pairs without any cross edge get no meta-edge.
    """
    for node in graph.nodes:
        if node not in assignment:
            raise GraphError(f"partition is missing node {node!r}")

    cluster_ids = sorted(set(assignment[n] for n in graph.nodes))
    meta_index = {c: i for i, c in enumerate(cluster_ids)}
    member_count = [0] * len(cluster_ids)
    meta_weights = [0.0] * len(cluster_ids)
    node_cluster = [meta_index[assignment[n]] for n in graph.nodes]
    for i, n in enumerate(graph.nodes):
        member_count[node_cluster[i]] += 1
        meta_weights[node_cluster[i]] += graph.node_weights[i]

    cross: dict[tuple[int, int], float] = {}
    for (u, v), w in graph.edges.items():
        cu, cv = node_cluster[u], node_cluster[v]
        if cu == cv:
            continue
        key = (cu, cv) if cu < cv else (cv, cu)
        cross[key] = cross.get(key, 0.0) + w

    edges = {
        (a, b): w / (member_count[a] * member_count[b])
        for (a, b), w in sorted(cross.items())
        if w > 0.0
    }
    return WeightedGraph(nodes=list(cluster_ids), node_weights=meta_weights, edges=edges)


def dump_graph(graph: WeightedGraph, path) -> None:
    """Checkpoint a graph as JSONL: one header line, then one line per edge."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "nodes": list(graph.nodes),
            "node_weights": graph.node_weights,
        }, sort_keys=True) + "\n")
        for u, v, w in graph.sorted_edges():
            fh.write(json.dumps([u, v, w]) + "\n")


def restore_graph(path) -> WeightedGraph:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        edges = {}
        for line in fh:
            if line.strip():
                u, v, w = json.loads(line)
                edges[(u, v)] = w
    nodes = [tuple(n) if isinstance(n, list) else n for n in header["nodes"]]
    return WeightedGraph(nodes=nodes, node_weights=header["node_weights"], edges=edges)

"""Community detection with the Leiden algorithm under the Constant Potts Model.

Quality of a partition is H = sum over clusters of [e_c - gamma * n_c*(n_c-1)/2]
with e_c the internal edge weight and n_c the summed node weight of the
cluster. Publication graphs have unit node weights, so this is plain CPM;
meta-graphs carry publication counts as node weights, which makes the size
penalty operate on publications rather than meta-nodes.

The implementation is determinism-first: the only randomness is the seeded
shuffle of node visit order, every tie breaks toward the lowest candidate
cluster id, and the move/refine/aggregate phases are sequential. A fixed seed
reproduces partitions bit for bit.

Small-cluster handling comes in two flavors, matching the two mechanisms the
pipeline needs: per-node reassignment (used at the publication level) and
whole-cluster merging on the meta-graph (used at aggregate levels).
"""

from __future__ import annotations

import heapq
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .citegraph import GraphError, WeightedGraph, aggregate_graph

logger = logging.getLogger(__name__)

LEVEL_NAMES = ("topic", "specialty", "discipline", "research_area")

# Moves must beat this margin; guards against float-noise oscillation.
_GAIN_EPS = 1e-12


@dataclass
class Partition:
    """Total assignment of graph nodes to dense integer cluster ids.

    ``unassigned`` flags the id of the catch-all cluster created when
    small-cluster reassignment finds nodes with no usable connection.
    """

    assignment: dict[Hashable, int] = field(default_factory=dict)
    unassigned: int | None = None

    def clusters(self) -> dict[int, list[Hashable]]:
        out: dict[int, list[Hashable]] = {}
        for node in self.assignment:
            out.setdefault(self.assignment[node], []).append(node)
        return {c: sorted(members, key=_node_key) for c, members in sorted(out.items())}

    def n_clusters(self) -> int:
        return len(set(self.assignment.values()))

    def sizes(self, graph: WeightedGraph | None = None) -> dict[int, float]:
        """Cluster sizes as summed node weight (member count if no graph)."""
        out: dict[int, float] = {}
        if graph is None:
            for c in self.assignment.values():
                out[c] = out.get(c, 0) + 1
            return out
        for i, node in enumerate(graph.nodes):
            c = self.assignment[node]
            out[c] = out.get(c, 0.0) + graph.node_weights[i]
        return out


@dataclass
class LevelSpec:
    name: str
    resolution: float
    min_size: int = 0
    small_cluster_mode: str = "merge_clusters"  # or "reassign_nodes"

    def __post_init__(self) -> None:
        if self.name not in LEVEL_NAMES:
            raise ValueError(f"unknown level name {self.name!r}, expected one of {LEVEL_NAMES}")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.small_cluster_mode not in ("reassign_nodes", "merge_clusters"):
            raise ValueError(f"unknown small_cluster_mode {self.small_cluster_mode!r}")


def default_level_specs() -> list[LevelSpec]:
    """The four standard levels with their stock parameters.

    The topic resolution and the minimum sizes are the stock values; the
    coarser resolutions are order-of-magnitude starting points that any real
    corpus needs calibrated in its pipeline config (meta-level edge weights
    are per-pair averages, so usable resolutions are much smaller there).
    """
    return [
        LevelSpec("topic", resolution=1e-4, min_size=50, small_cluster_mode="reassign_nodes"),
        LevelSpec("specialty", resolution=1e-6, min_size=500, small_cluster_mode="merge_clusters"),
        LevelSpec("discipline", resolution=1e-7, min_size=5000, small_cluster_mode="merge_clusters"),
        LevelSpec("research_area", resolution=1e-8, min_size=0, small_cluster_mode="merge_clusters"),
    ]


def cpm_quality(graph: WeightedGraph, partition: Partition, gamma: float) -> float:
    """Evaluate H = sum_c [e_c - gamma * n_c*(n_c-1)/2] for a total partition."""
    internal: dict[int, float] = {}
    weight: dict[int, float] = {}
    for i, node in enumerate(graph.nodes):
        if node not in partition.assignment:
            raise GraphError(f"partition is missing node {node!r}")
        c = partition.assignment[node]
        weight[c] = weight.get(c, 0.0) + graph.node_weights[i]
    for (u, v), w in graph.edges.items():
        cu = partition.assignment[graph.nodes[u]]
        cv = partition.assignment[graph.nodes[v]]
        if cu == cv:
            internal[cu] = internal.get(cu, 0.0) + w
    quality = 0.0
    for c, n_c in weight.items():
        quality += internal.get(c, 0.0) - gamma * n_c * (n_c - 1.0) / 2.0
    return quality


def singleton_partition(graph: WeightedGraph) -> Partition:
    return Partition({node: i for i, node in enumerate(graph.nodes)})


# ---------------------------------------------------------------------------
# Leiden core (index-based, operating on adjacency lists)
# ---------------------------------------------------------------------------


# Small graphs get multiple independent starts (keeping the best partition);
# the tinier the graph, the more rematching optima matter and the cheaper a
# start is. Large graphs run a single start for speed.
_RESTART_SCHEDULE = ((16, 48), (200, 10))


def leiden(
    graph: WeightedGraph,
    gamma: float,
    seed: int = 0,
    max_iterations: int = 100,
    restarts: int | None = None,
) -> Partition:
    """Run Leiden/CPM until convergence or ``max_iterations`` passes.

    Each pass chains local moving, refinement and aggregation down to a
    stable aggregate graph. Quality is non-decreasing across passes; the loop
    exits early once a pass makes no move. Small graphs get several
    independent starts (best partition kept) since greedy moves alone stall
    in rematching optima there. Every cluster of the returned partition
    induces a connected subgraph.
    """
    n = graph.n_nodes
    if n == 0:
        return Partition({})
    adj = graph.adjacency()
    node_w = [float(w) for w in graph.node_weights]
    if restarts is None:
        restarts = 1
        for limit, count in _RESTART_SCHEDULE:
            if n <= limit:
                restarts = count
                break
    master = random.Random(seed)

    best_comm: list[int] | None = None
    best_q = float("-inf")
    for _ in range(max(1, restarts)):
        rng = random.Random(master.getrandbits(64))
        comm = list(range(n))
        for iteration in range(max_iterations):
            comm, improved = _leiden_pass(adj, node_w, comm, gamma, rng)
            if not improved:
                logger.debug("leiden converged after %d pass(es)", iteration + 1)
                break
        comm = _split_disconnected(adj, comm)
        q = _quality_of(graph, comm, gamma)
        if q > best_q + _GAIN_EPS:
            best_q = q
            best_comm = comm

    dense: dict[int, int] = {}
    assignment: dict[Hashable, int] = {}
    for i, node in enumerate(graph.nodes):
        label = best_comm[i]
        if label not in dense:
            dense[label] = len(dense)
        assignment[node] = dense[label]
    return Partition(assignment)


def _quality_of(graph: WeightedGraph, comm: list[int], gamma: float) -> float:
    internal = 0.0
    for (u, v), w in graph.edges.items():
        if comm[u] == comm[v]:
            internal += w
    weight: dict[int, float] = {}
    for i in range(graph.n_nodes):
        weight[comm[i]] = weight.get(comm[i], 0.0) + graph.node_weights[i]
    return internal - gamma * sum(n_c * (n_c - 1.0) / 2.0 for n_c in weight.values())


def _leiden_pass(
    adj0: list[list[tuple[int, float]]],
    node_w0: list[float],
    comm0: list[int],
    gamma: float,
    rng: random.Random,
) -> tuple[list[int], bool]:
    """One full pass: local move, then refine+aggregate until stable."""
    adj, node_w = adj0, node_w0
    cur_comm = list(comm0)
    cur_of_orig = list(range(len(adj0)))
    improved = False

    while True:
        moved = _local_move(adj, node_w, cur_comm, gamma, rng)
        improved = improved or moved
        if len(set(cur_comm)) == len(adj):
            break
        refined = _refine(adj, node_w, cur_comm, gamma, rng)
        new_adj, agg_of = _aggregate_by(adj, refined)
        if len(new_adj) == len(adj):
            break
        new_comm = [0] * len(new_adj)
        new_node_w = [0.0] * len(new_adj)
        for v, a in enumerate(agg_of):
            new_comm[a] = cur_comm[v]
            new_node_w[a] += node_w[v]
        adj, node_w, cur_comm = new_adj, new_node_w, new_comm
        cur_of_orig = [agg_of[c] for c in cur_of_orig]

    final = [cur_comm[cur_of_orig[o]] for o in range(len(adj0))]
    improved = _merge_whole_communities(adj0, node_w0, final, gamma, rng) or improved
    return final, improved


def _merge_whole_communities(
    adj: list[list[tuple[int, float]]],
    node_w: list[float],
    comm: list[int],
    gamma: float,
    rng: random.Random,
) -> bool:
    """Greedy merges of entire communities when that raises quality.

    The refinement-based chain can leave pairs of communities whose merge is
    beneficial only as a whole; a local move over the community graph (one
    node per community, starting from singletons) closes that gap. Merges
    need a positive-gain edge, so merged communities stay connected.
    """
    labels = sorted(set(comm))
    if len(labels) <= 1:
        return False
    group_of = {c: i for i, c in enumerate(labels)}
    groups = [group_of[c] for c in comm]
    c_adj, _ = _aggregate_by(adj, groups)
    c_w = [0.0] * len(labels)
    for v in range(len(adj)):
        c_w[groups[v]] += node_w[v]
    c_comm = list(range(len(labels)))
    moved = _local_move(c_adj, c_w, c_comm, gamma, rng)
    if moved:
        for v in range(len(comm)):
            comm[v] = c_comm[groups[v]]
    return moved


def _local_move(
    adj: list[list[tuple[int, float]]],
    node_w: list[float],
    comm: list[int],
    gamma: float,
    rng: random.Random,
) -> bool:
    """Queue-based local moving; mutates ``comm``; returns True if anything moved."""
    n = len(adj)
    labels = sorted(set(comm))
    relabel = {c: i for i, c in enumerate(labels)}
    for v in range(n):
        comm[v] = relabel[comm[v]]
    next_label = len(labels)
    free_labels: list[int] = []

    comm_w: dict[int, float] = {}
    for v in range(n):
        comm_w[comm[v]] = comm_w.get(comm[v], 0.0) + node_w[v]

    order = list(range(n))
    rng.shuffle(order)
    queue = deque(order)
    in_queue = [True] * n
    moved_any = False

    while queue:
        v = queue.popleft()
        in_queue[v] = False
        cv = comm[v]
        wv = node_w[v]

        w_to: dict[int, float] = {}
        for u, w in adj[v]:
            cu = comm[u]
            w_to[cu] = w_to.get(cu, 0.0) + w

        # Gain of pulling v out of its current cluster.
        base = w_to.get(cv, 0.0) - gamma * wv * (comm_w[cv] - wv)

        best_c = cv
        best_gain = 0.0
        for c in sorted(w_to):
            if c == cv:
                continue
            gain = w_to[c] - gamma * wv * comm_w[c] - base
            if gain > best_gain + _GAIN_EPS:
                best_gain = gain
                best_c = c
        # A fresh singleton cluster only wins on strictly higher gain, and
        # only if v is not already alone.
        if comm_w[cv] - wv > 0 and -base > best_gain + _GAIN_EPS:
            best_gain = -base
            best_c = -1

        if best_c == cv or best_gain <= _GAIN_EPS:
            continue

        if best_c == -1:
            best_c = heapq.heappop(free_labels) if free_labels else next_label
            if best_c == next_label:
                next_label += 1

        comm_w[cv] -= wv
        if comm_w[cv] <= 0.0:
            del comm_w[cv]
            heapq.heappush(free_labels, cv)
        comm[v] = best_c
        comm_w[best_c] = comm_w.get(best_c, 0.0) + wv
        moved_any = True

        for u, _ in adj[v]:
            if comm[u] != best_c and not in_queue[u]:
                queue.append(u)
                in_queue[u] = True

    return moved_any


def _refine(
    adj: list[list[tuple[int, float]]],
    node_w: list[float],
    comm: list[int],
    gamma: float,
    rng: random.Random,
) -> list[int]:
    """Split each cluster into well-connected sub-clusters.

    Starting from singletons, nodes that are still alone and well-connected
    within their cluster merge into one of the well-connected sub-clusters
    offering a positive quality gain, picked from the seeded stream as in the
    cited algorithm (the randomized choice is what lets successive passes
    explore different sub-structures; a pure argmax refinement measurably
    stalls in local optima). Positive gain requires an actual edge, so
    sub-clusters stay connected.
    """
    n = len(adj)
    refined = list(range(n))
    ref_w = list(node_w)
    ref_n = [1] * n
    comm_w: dict[int, float] = {}
    for v in range(n):
        comm_w[comm[v]] = comm_w.get(comm[v], 0.0) + node_w[v]

    # Edge weight from each (currently singleton) refined cluster to the rest
    # of its parent cluster.
    conn = [0.0] * n
    for v in range(n):
        for u, w in adj[v]:
            if comm[u] == comm[v]:
                conn[v] += w

    order = list(range(n))
    rng.shuffle(order)

    for v in order:
        rv = refined[v]
        if ref_n[rv] > 1:
            continue
        cv = comm[v]
        wv = node_w[v]
        if conn[rv] < gamma * wv * (comm_w[cv] - wv) - _GAIN_EPS:
            continue

        w_to: dict[int, float] = {}
        for u, w in adj[v]:
            if comm[u] == cv:
                ru = refined[u]
                w_to[ru] = w_to.get(ru, 0.0) + w

        candidates = []
        for r in sorted(w_to):
            if r == rv:
                continue
            if conn[r] < gamma * ref_w[r] * (comm_w[cv] - ref_w[r]) - _GAIN_EPS:
                continue
            if w_to[r] - gamma * wv * ref_w[r] > _GAIN_EPS:
                candidates.append(r)

        if candidates:
            best_r = candidates[rng.randrange(len(candidates))]
            refined[v] = best_r
            conn[best_r] += conn[rv] - 2.0 * w_to[best_r]
            ref_w[best_r] += wv
            ref_n[best_r] += 1
            ref_w[rv] = 0.0
            ref_n[rv] = 0

    return refined


def _aggregate_by(
    adj: list[list[tuple[int, float]]],
    groups: list[int],
) -> tuple[list[list[tuple[int, float]]], list[int]]:
    """Collapse nodes by ``groups``; returns (adjacency, node -> group index).

    Edges internal to a group are dropped: they are constant under later
    moves and quality is always re-evaluated on the original graph.
    """
    labels = sorted(set(groups))
    index = {g: i for i, g in enumerate(labels)}
    agg_of = [index[g] for g in groups]
    m = len(labels)

    cross: dict[tuple[int, int], float] = {}
    for v in range(len(adj)):
        av = agg_of[v]
        for u, w in adj[v]:
            if u <= v:
                continue
            au = agg_of[u]
            if au == av:
                continue
            key = (av, au) if av < au else (au, av)
            cross[key] = cross.get(key, 0.0) + w

    new_adj: list[list[tuple[int, float]]] = [[] for _ in range(m)]
    for (a, b), w in sorted(cross.items()):
        new_adj[a].append((b, w))
        new_adj[b].append((a, w))
    for row in new_adj:
        row.sort()
    return new_adj, agg_of


def _split_disconnected(adj: list[list[tuple[int, float]]], comm: list[int]) -> list[int]:
    """Give each connected component of a cluster its own label.

    Splitting a disconnected cluster never lowers CPM quality, so this is a
    safe final guarantee regardless of refinement details.
    """
    n = len(adj)
    members: dict[int, list[int]] = {}
    for v in range(n):
        members.setdefault(comm[v], []).append(v)

    next_label = max(comm) + 1 if comm else 0
    out = list(comm)
    for label in sorted(members):
        nodes = members[label]
        node_set = set(nodes)
        seen: set[int] = set()
        first_component = True
        for start in nodes:
            if start in seen:
                continue
            component = [start]
            seen.add(start)
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for u, _ in adj[x]:
                    if u in node_set and u not in seen:
                        seen.add(u)
                        component.append(u)
                        queue.append(u)
            if first_component:
                first_component = False
            else:
                for v in component:
                    out[v] = next_label
                next_label += 1
    return out


def is_connected_partition(graph: WeightedGraph, partition: Partition) -> bool:
    """BFS check that every cluster induces a connected subgraph."""
    adj = graph.adjacency()
    members: dict[int, list[int]] = {}
    for i, node in enumerate(graph.nodes):
        members.setdefault(partition.assignment[node], []).append(i)
    for nodes in members.values():
        if len(nodes) <= 1:
            continue
        node_set = set(nodes)
        seen = {nodes[0]}
        queue = deque([nodes[0]])
        while queue:
            x = queue.popleft()
            for u, _ in adj[x]:
                if u in node_set and u not in seen:
                    seen.add(u)
                    queue.append(u)
        if len(seen) != len(nodes):
            return False
    return True


# ---------------------------------------------------------------------------
# Small-cluster handling
# ---------------------------------------------------------------------------


def reassign_small_clusters(
    graph: WeightedGraph,
    partition: Partition,
    min_size: float,
) -> Partition:
    """Dissolve below-minimum clusters by moving their members individually.

    Target selection is simultaneous against the original partition: each
    member of a small cluster goes to the qualifying cluster (size >= min
    before the pass; such clusters only grow) it is most strongly linked to,
    ties toward the lower cluster id. Members without a link to any
    qualifying cluster follow their original cluster's strongest aggregate
    relation; if the whole cluster has none, they land in a dedicated
    "unassigned" cluster. With no qualifying cluster at all the result is a
    single cluster.
    """
    sizes = partition.sizes(graph)
    qualifying = {c for c, s in sizes.items() if s >= min_size}
    if not qualifying:
        target = min(sizes)
        return Partition({node: target for node in partition.assignment})

    small = sorted(c for c, s in sizes.items() if 0 < s < min_size)
    if not small:
        return Partition(dict(partition.assignment), unassigned=partition.unassigned)

    small_set = set(small)
    adj = graph.adjacency()
    # Aggregate relation from each small cluster to each qualifying cluster,
    # for members that have no direct link of their own.
    cluster_rel: dict[int, dict[int, float]] = {c: {} for c in small}

    node_targets: dict[Hashable, int | None] = {}
    for i, node in enumerate(graph.nodes):
        c = partition.assignment[node]
        if c not in small_set:
            continue
        link: dict[int, float] = {}
        for j, w in adj[i]:
            cj = partition.assignment[graph.nodes[j]]
            if cj in qualifying:
                link[cj] = link.get(cj, 0.0) + w
                rel = cluster_rel[c]
                rel[cj] = rel.get(cj, 0.0) + w
        if link:
            node_targets[node] = _argmax_lowest_id(link)
        else:
            node_targets[node] = None

    assignment = dict(partition.assignment)
    unassigned: int | None = None
    fallback: dict[int, int | None] = {}
    for c in small:
        fallback[c] = _argmax_lowest_id(cluster_rel[c]) if cluster_rel[c] else None

    for node, target in sorted(node_targets.items(), key=lambda kv: _node_key(kv[0])):
        if target is None:
            target = fallback[partition.assignment[node]]
        if target is None:
            if unassigned is None:
                unassigned = max(sizes) + 1
            target = unassigned
        assignment[node] = target

    return Partition(assignment, unassigned=unassigned)


def merge_small_clusters(
    meta_graph: WeightedGraph,
    partition: Partition,
    min_size: float,
) -> Partition:
    """Merge below-threshold clusters along their strongest meta relations.

    ``meta_graph`` has one node per cluster of ``partition`` with
    publication counts as node weights and averaged relation weights on the
    edges. Repeatedly the smallest below-threshold cluster merges into the
    above-threshold cluster with the strongest relation; without such a
    target it merges with its strongest below-threshold neighbor, and a
    cluster with no relations at all falls back to the largest cluster.
    """
    sizes = {c: float(meta_graph.node_weights[i]) for i, c in enumerate(meta_graph.nodes)}
    member_n = {c: 0 for c in meta_graph.nodes}
    for unit in partition.assignment:
        member_n[partition.assignment[unit]] += 1

    # Total (un-averaged) cross weights so merges recombine exactly.
    total_w: dict[int, dict[int, float]] = {c: {} for c in meta_graph.nodes}
    for (ui, vi), r in meta_graph.edges.items():
        a, b = meta_graph.nodes[ui], meta_graph.nodes[vi]
        w = r * member_n[a] * member_n[b]
        total_w[a][b] = w
        total_w[b][a] = w

    merged_into: dict[int, int] = {}

    def resolve(c: int) -> int:
        while c in merged_into:
            c = merged_into[c]
        return c

    alive = set(meta_graph.nodes)
    while True:
        below = sorted((sizes[c], c) for c in alive if sizes[c] < min_size)
        if not below or len(alive) == 1:
            break
        c = below[0][1]
        rels = total_w[c]
        above_rel = {d: w for d, w in rels.items() if sizes[d] >= min_size and w > 0.0}
        below_rel = {d: w for d, w in rels.items() if sizes[d] < min_size and w > 0.0}
        if above_rel:
            target = _argmax_lowest_id(
                {d: w / (member_n[c] * member_n[d]) for d, w in above_rel.items()})
        elif below_rel:
            target = _argmax_lowest_id(
                {d: w / (member_n[c] * member_n[d]) for d, w in below_rel.items()})
        else:
            # No relations at all: fold into the largest other cluster.
            target = max((sizes[d], -d) for d in alive if d != c)[1] * -1
        # Merge c into target.
        merged_into[c] = target
        alive.remove(c)
        sizes[target] += sizes[c]
        member_n[target] += member_n[c]
        for d, w in total_w[c].items():
            if d == target or d not in alive:
                continue
            total_w[target][d] = total_w[target].get(d, 0.0) + w
            total_w[d][target] = total_w[d].get(target, 0.0) + w
        for d in total_w[c]:
            total_w[d].pop(c, None)
        total_w[target].pop(c, None)
        total_w[c] = {}

    assignment = {unit: resolve(partition.assignment[unit]) for unit in partition.assignment}
    return Partition(assignment)


def _argmax_lowest_id(weights: dict[int, float]) -> int:
    """Key with the maximal value; ties break toward the lowest key."""
    best = None
    best_w = float("-inf")
    for key in sorted(weights):
        if weights[key] > best_w + _GAIN_EPS:
            best_w = weights[key]
            best = key
    return best


def _node_key(node: Hashable) -> tuple:
    """Deterministic order for mixed node id types (ints, digit strings, text)."""
    if isinstance(node, int):
        return (0, node, "")
    s = str(node)
    if s.isdigit():
        return (1, int(s), s)
    return (2, 0, s)


# ---------------------------------------------------------------------------
# Multi-level hierarchy
# ---------------------------------------------------------------------------


@dataclass
class ClusterInfo:
    path: str
    level: str
    size: int
    parent_path: str | None
    members: list  # unit ids one level down (pub_ids at the finest level)


@dataclass
class TreeLevel:
    name: str
    assignment: dict  # unit id -> cluster path at this level
    clusters: list[ClusterInfo]

    def cluster(self, path: str) -> ClusterInfo:
        for c in self.clusters:
            if c.path == path:
                return c
        raise KeyError(path)


@dataclass
class ClusterTree:
    """Nested partitions, finest level first."""

    levels: list[TreeLevel]

    def level(self, name: str) -> TreeLevel:
        for lvl in self.levels:
            if lvl.name == name:
                return lvl
        raise KeyError(name)

    def level_names(self) -> list[str]:
        return [lvl.name for lvl in self.levels]

    def pub_assignment(self, name: str) -> dict[str, str]:
        """Publication id -> cluster path at the named level."""
        mapping = dict(self.levels[0].assignment)
        if name == self.levels[0].name:
            return mapping
        for lvl in self.levels[1:]:
            mapping = {pub: lvl.assignment[path] for pub, path in mapping.items()}
            if lvl.name == name:
                return mapping
        raise KeyError(name)

    def validate(self) -> None:
        """Assert strict nesting and conserved publication counts."""
        corpus_size = sum(c.size for c in self.levels[0].clusters)
        for lvl in self.levels:
            total = sum(c.size for c in lvl.clusters)
            if total != corpus_size:
                raise GraphError(f"level {lvl.name}: size total {total} != corpus {corpus_size}")
        for lower, upper in zip(self.levels, self.levels[1:]):
            for c in lower.clusters:
                parent = upper.assignment.get(c.path)
                if parent is None:
                    raise GraphError(f"{lower.name} cluster {c.path} has no parent")
                if c.parent_path != parent:
                    raise GraphError(f"{lower.name} cluster {c.path}: inconsistent parent")
                if not c.path.startswith(parent + "."):
                    raise GraphError(f"{lower.name} cluster {c.path} not nested under {parent}")


def path_sort_key(path: str) -> tuple:
    return tuple(int(p) for p in path.split("."))


def build_hierarchy(
    corpus,
    graph: WeightedGraph,
    level_specs: Sequence[LevelSpec],
    seed: int = 0,
    max_iterations: int = 100,
) -> ClusterTree:
    """Cluster the publication graph through all levels, finest to coarsest.

    The finest level runs on the publication graph directly; each subsequent
    level clusters the aggregate of the previous level. Small clusters are
    handled per the level's mode. Hierarchical ids are dotted paths assigned
    top-down, numbering clusters within a parent by descending publication
    count (1-based).
    """
    if not level_specs:
        raise ValueError("at least one level spec is required")
    ranks = [LEVEL_NAMES.index(spec.name) for spec in level_specs]
    if ranks != sorted(ranks) or len(set(ranks)) != len(ranks):
        raise ValueError(
            f"level specs must run finest to coarsest without repeats, got "
            f"{[spec.name for spec in level_specs]}")

    partitions: list[Partition] = []
    graphs: list[WeightedGraph] = [graph]
    cur_graph = graph
    for depth, spec in enumerate(level_specs):
        part = leiden(cur_graph, spec.resolution, seed=seed + depth, max_iterations=max_iterations)
        if spec.min_size > 0 and cur_graph.n_nodes > 0:
            if spec.small_cluster_mode == "reassign_nodes":
                part = reassign_small_clusters(cur_graph, part, spec.min_size)
            else:
                meta = aggregate_graph(cur_graph, part.assignment)
                part = merge_small_clusters(meta, part, spec.min_size)
        partitions.append(part)
        logger.info("level %s: %d clusters", spec.name, part.n_clusters())
        if depth + 1 < len(level_specs):
            cur_graph = aggregate_graph(cur_graph, part.assignment)
            graphs.append(cur_graph)

    return _assemble_tree(level_specs, graphs, partitions)


def _assemble_tree(
    level_specs: Sequence[LevelSpec],
    graphs: list[WeightedGraph],
    partitions: list[Partition],
) -> ClusterTree:
    depth = len(level_specs)
    # Publication size per cluster id, per level.
    sizes: list[dict[int, float]] = []
    for lvl in range(depth):
        sizes.append(partitions[lvl].sizes(graphs[lvl]))

    # Parent cluster id at lvl+1 of each cluster id at lvl.
    parent_of: list[dict[int, int]] = []
    for lvl in range(depth - 1):
        parent_of.append({c: partitions[lvl + 1].assignment[c]
                          for c in set(partitions[lvl].assignment.values())})

    # Number clusters top-down: by descending size, ties by cluster id.
    paths: list[dict[int, str]] = [dict() for _ in range(depth)]
    top = depth - 1
    order = sorted(sizes[top], key=lambda c: (-sizes[top][c], c))
    for rank, c in enumerate(order, start=1):
        paths[top][c] = str(rank)
    for lvl in range(depth - 2, -1, -1):
        by_parent: dict[int, list[int]] = {}
        for c in sizes[lvl]:
            by_parent.setdefault(parent_of[lvl][c], []).append(c)
        for parent, children in sorted(by_parent.items()):
            children.sort(key=lambda c: (-sizes[lvl][c], c))
            for rank, c in enumerate(children, start=1):
                paths[lvl][c] = f"{paths[lvl + 1][parent]}.{rank}"

    levels: list[TreeLevel] = []
    for lvl, spec in enumerate(level_specs):
        if lvl == 0:
            unit_path = {unit: paths[0][c] for unit, c in partitions[0].assignment.items()}
        else:
            unit_path = {paths[lvl - 1][unit]: paths[lvl][c]
                         for unit, c in partitions[lvl].assignment.items()}
        members: dict[str, list] = {}
        for unit, path in unit_path.items():
            members.setdefault(path, []).append(unit)
        clusters = []
        for c, path in sorted(paths[lvl].items(), key=lambda kv: path_sort_key(kv[1])):
            parent_path = paths[lvl + 1][parent_of[lvl][c]] if lvl < depth - 1 else None
            member_list = members.get(path, [])
            member_list.sort(key=_member_key)
            clusters.append(ClusterInfo(
                path=path,
                level=spec.name,
                size=int(round(sizes[lvl][c])),
                parent_path=parent_path,
                members=member_list,
            ))
        levels.append(TreeLevel(name=spec.name, assignment=unit_path, clusters=clusters))

    tree = ClusterTree(levels=levels)
    tree.validate()
    return tree


def _member_key(unit) -> tuple:
    if isinstance(unit, str) and unit and all(p.isdigit() for p in unit.split(".")):
        return (0,) + tuple(int(p) for p in unit.split("."))
    return (1, str(unit))


# ---------------------------------------------------------------------------
# Serialization: one TSV per level plus a manifest
# ---------------------------------------------------------------------------


def save_tree(tree: ClusterTree, directory) -> None:
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in tree.level_names():
        assignment = tree.pub_assignment(name)
        with (directory / f"assignment_{name}.tsv").open("w", encoding="utf-8") as fh:
            for pub in sorted(assignment, key=_member_key):
                fh.write(f"{pub}\t{assignment[pub]}\n")
    with (directory / "clusters.tsv").open("w", encoding="utf-8") as fh:
        for lvl in tree.levels:
            for c in lvl.clusters:
                fh.write(f"{c.path}\t{c.level}\t{c.size}\n")


def load_tree(directory, level_names: Sequence[str]) -> ClusterTree:
    from pathlib import Path

    directory = Path(directory)
    pub_maps: dict[str, dict[str, str]] = {}
    for name in level_names:
        mapping: dict[str, str] = {}
        with (directory / f"assignment_{name}.tsv").open("r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    pub, path = line.rstrip("\n").split("\t")
                    mapping[pub] = path
        pub_maps[name] = mapping

    meta: dict[str, tuple[str, int]] = {}
    with (directory / "clusters.tsv").open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                path, level, size = line.rstrip("\n").split("\t")
                meta[f"{level}:{path}"] = (level, int(size))

    levels: list[TreeLevel] = []
    for i, name in enumerate(level_names):
        if i == 0:
            assignment = dict(pub_maps[name])
        else:
            below, here = pub_maps[level_names[i - 1]], pub_maps[name]
            assignment = {below[pub]: here[pub] for pub in below}
        members: dict[str, list] = {}
        for unit, path in assignment.items():
            members.setdefault(path, []).append(unit)
        upper = pub_maps[level_names[i + 1]] if i + 1 < len(level_names) else None
        clusters = []
        for path in sorted(members, key=path_sort_key):
            parent_path = None
            if upper is not None:
                any_pub = next(p for p, q in pub_maps[name].items() if q == path)
                parent_path = upper[any_pub]
            member_list = sorted(members[path], key=_member_key)
            clusters.append(ClusterInfo(
                path=path,
                level=name,
                size=meta[f"{name}:{path}"][1],
                parent_path=parent_path,
                members=member_list,
            ))
        levels.append(TreeLevel(name=name, assignment=assignment, clusters=clusters))
    tree = ClusterTree(levels=levels)
    tree.validate()
    return tree

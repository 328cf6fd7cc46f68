"""Force-directed layout and hierarchical child placement.

The force model follows the classic ForceAtlas family: all node pairs repel
with strength proportional to (deg+1)(deg+1)/distance, edges attract in
proportion to weight times distance, and a constant-magnitude gravity of
strength gravity*(deg+1) pulls nodes toward the origin. Displacement carries
inertia from the previous step and is capped by max_displacement times a
linear cooling multiplier (1.0 down to 0.1 when cooling = 1). When
freeze_balance is on, every other iteration is damped by freeze_inertia with
its cap scaled to freeze_strength percent. outbound_attraction and
adjust_sizes are accepted and carried through but have no effect here.

Pairwise repulsion is exact up to 2,000 nodes and switches to a Barnes-Hut
quadtree above that. Layouts are deterministic for a fixed seed either way.

Child networks are recentered on their parent with the expansion scaled by
m * (1/n): adjusted = (raw - raw_mean) * m/n + parent. The mean of adjusted
positions is therefore exactly the parent position.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .citegraph import WeightedGraph

BARNES_HUT_THRESHOLD = 2000
_BH_THETA = 0.7
_EPS = 1e-9

DEFAULT_CHILD_EXPANSION = 0.5  # m
DEFAULT_SIBLING_FACTOR = 3.0


@dataclass(frozen=True)
class LayoutParams:
    iterations: int = 10_000
    inertia: float = 0.1
    repulsion_strength: float = 500.0
    attraction_strength: float = 10.0
    max_displacement: float = 10.0
    freeze_balance: bool = True
    freeze_strength: float = 80.0
    freeze_inertia: float = 0.2
    gravity: float = 30.0
    outbound_attraction: bool = False
    adjust_sizes: bool = False
    speed: float = 1.0
    cooling: float = 1.0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        for name in ("repulsion_strength", "attraction_strength", "gravity"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


PRESETS: dict[str, LayoutParams] = {
    "discipline": LayoutParams(),
    "specialty": LayoutParams(repulsion_strength=2000.0, attraction_strength=20.0,
                              gravity=10.0),
}


def force_atlas(
    graph: WeightedGraph,
    params: LayoutParams,
    seed: int = 0,
    initial: dict | None = None,
) -> dict:
    """Lay out ``graph``; returns node_id -> (x, y).

    ``initial`` optionally fixes the starting positions (node_id -> (x, y));
    otherwise they are drawn uniformly from a box scaled by sqrt(n) using the
    seed. Coincident nodes exert no repulsion on each other.
    """
    n = graph.n_nodes
    if n == 0:
        return {}

    if initial is not None:
        pos = np.array([initial[node] for node in graph.nodes], dtype=np.float64)
    else:
        rng = random.Random(seed)
        span = 10.0 * max(1.0, n) ** 0.5
        pos = np.array(
            [[rng.uniform(-span, span), rng.uniform(-span, span)] for _ in range(n)],
            dtype=np.float64)

    mass = np.array(graph.degrees(), dtype=np.float64) + 1.0
    edges = graph.sorted_edges()
    if edges:
        e_u = np.array([e[0] for e in edges], dtype=np.intp)
        e_v = np.array([e[1] for e in edges], dtype=np.intp)
        e_w = np.array([e[2] for e in edges], dtype=np.float64)
    else:
        e_u = e_v = np.empty(0, dtype=np.intp)
        e_w = np.empty(0, dtype=np.float64)

    disp = np.zeros_like(pos)
    iters = params.iterations
    for t in range(iters):
        if n > BARNES_HUT_THRESHOLD:
            force = _repulsion_barnes_hut(pos, mass, params.repulsion_strength)
        else:
            force = _repulsion_exact(pos, mass, params.repulsion_strength)

        if len(e_w):
            delta = pos[e_v] - pos[e_u]
            pull = params.attraction_strength * e_w[:, None] * delta
            np.add.at(force, e_u, pull)
            np.add.at(force, e_v, -pull)

        if params.gravity > 0:
            # constant-magnitude pull toward the origin; zero exactly there
            radius = np.sqrt((pos * pos).sum(axis=1))
            safe = np.maximum(radius, _EPS)
            force -= params.gravity * mass[:, None] * pos / safe[:, None]

        disp = params.inertia * disp + params.speed * force

        cool = 1.0
        if iters > 1:
            cool = 1.0 - 0.9 * params.cooling * t / (iters - 1)
        cap = params.max_displacement * max(cool, 0.05)
        if params.freeze_balance and t % 2 == 1:
            disp = disp * params.freeze_inertia
            cap *= params.freeze_strength / 100.0

        norms = np.sqrt((disp * disp).sum(axis=1))
        over = norms > cap
        if over.any():
            disp[over] *= (cap / norms[over])[:, None]
        pos += disp

    return {node: (float(pos[i, 0]), float(pos[i, 1])) for i, node in enumerate(graph.nodes)}


def _repulsion_exact(pos: np.ndarray, mass: np.ndarray, strength: float) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    d2 = (diff * diff).sum(axis=2)
    np.fill_diagonal(d2, 1.0)
    near_zero = d2 < _EPS * _EPS
    d2 = np.maximum(d2, _EPS * _EPS)
    # F = strength * m_i * m_j / d along the unit vector = strength*m_i*m_j/d^2 * diff
    scale = strength * mass[:, None] * mass[None, :] / d2
    np.fill_diagonal(scale, 0.0)
    scale[near_zero] = 0.0
    return (scale[:, :, None] * diff).sum(axis=1)


def _repulsion_barnes_hut(pos: np.ndarray, mass: np.ndarray, strength: float,
                          theta: float = _BH_THETA) -> np.ndarray:
    """Quadtree approximation of pairwise repulsion, O(n log n) per call."""
    n = len(pos)
    x_min, y_min = pos.min(axis=0)
    x_max, y_max = pos.max(axis=0)
    size = max(x_max - x_min, y_max - y_min, _EPS)

    # Flat quadtree: per cell, children indices, aggregate mass and center.
    cells_child = [[-1, -1, -1, -1]]
    cells_point = [-1]      # leaf payload: point index, -1 = empty/internal
    cells_mass = [0.0]
    cells_cx = [0.0]
    cells_cy = [0.0]
    cells_box = [(x_min, y_min, size)]

    def quadrant(px, py, bx, by, half):
        q = 0
        if px >= bx + half:
            q += 1
        if py >= by + half:
            q += 2
        return q

    def new_cell(point: int, box: tuple) -> int:
        cells_child.append([-1, -1, -1, -1])
        cells_point.append(point)
        cells_mass.append(float(mass[point]))
        cells_cx.append(float(mass[point] * pos[point, 0]))
        cells_cy.append(float(mass[point] * pos[point, 1]))
        cells_box.append(box)
        return len(cells_child) - 1

    empty_root = True
    for i in range(n):
        px, py = float(pos[i, 0]), float(pos[i, 1])
        node = 0
        depth = 0
        while True:
            cells_mass[node] += mass[i]
            cells_cx[node] += mass[i] * px
            cells_cy[node] += mass[i] * py
            if node == 0 and empty_root:
                cells_point[0] = i
                empty_root = False
                break
            bx, by, bsize = cells_box[node]
            if depth > 48:
                break  # coincident points stack into this cell's aggregate
            if cells_point[node] >= 0:
                # split leaf: push the existing point into its quadrant
                j = cells_point[node]
                cells_point[node] = -1
                qj = quadrant(float(pos[j, 0]), float(pos[j, 1]), bx, by, bsize / 2)
                cells_child[node][qj] = new_cell(
                    j, (bx + (qj % 2) * (bsize / 2), by + (qj // 2) * (bsize / 2), bsize / 2))
            qi = quadrant(px, py, bx, by, bsize / 2)
            if cells_child[node][qi] == -1:
                cells_child[node][qi] = new_cell(
                    i, (bx + (qi % 2) * (bsize / 2), by + (qi // 2) * (bsize / 2), bsize / 2))
                break
            node = cells_child[node][qi]
            depth += 1

    force = np.zeros_like(pos)
    for i in range(n):
        px, py = float(pos[i, 0]), float(pos[i, 1])
        mi = float(mass[i])
        fx = fy = 0.0
        stack = [0]
        while stack:
            node = stack.pop()
            m_node = cells_mass[node]
            if m_node <= 0.0 or cells_point[node] == i:
                continue
            cx = cells_cx[node] / m_node
            cy = cells_cy[node] / m_node
            dx = px - cx
            dy = py - cy
            d2 = dx * dx + dy * dy
            bsize = cells_box[node][2]
            if cells_point[node] >= 0 or bsize * bsize < theta * theta * d2:
                if d2 < _EPS * _EPS:
                    continue
                s = strength * mi * m_node / d2
                fx += s * dx
                fy += s * dy
            else:
                for c in cells_child[node]:
                    if c != -1:
                        stack.append(c)
        force[i, 0] = fx
        force[i, 1] = fy
    return force


def scale_sibling_edges(graph: WeightedGraph, parent_of: dict,
                        factor: float = DEFAULT_SIBLING_FACTOR) -> WeightedGraph:
    """Multiply weights of edges whose endpoints share a parent by ``factor``."""
    edges = {}
    for (u, v), w in graph.edges.items():
        pu = parent_of.get(graph.nodes[u])
        pv = parent_of.get(graph.nodes[v])
        edges[(u, v)] = w * factor if pu is not None and pu == pv else w
    return WeightedGraph(nodes=list(graph.nodes),
                         node_weights=list(graph.node_weights), edges=edges)


def place_children(raw_positions: dict, parent_xy: tuple[float, float],
                   m: float = DEFAULT_CHILD_EXPANSION) -> dict:
    """Recenter a child layout on its parent, scaled by m/n.

    adjusted = (raw - mean(raw)) * m * (1/n) + parent, per coordinate; the
    centroid of the result is exactly the parent position, and one child
    lands exactly on the parent.
    """
    n = len(raw_positions)
    if n == 0:
        return {}
    mean_x = sum(xy[0] for xy in raw_positions.values()) / n
    mean_y = sum(xy[1] for xy in raw_positions.values()) / n
    px, py = parent_xy
    return {
        node: ((x - mean_x) * m / n + px, (y - mean_y) * m / n + py)
        for node, (x, y) in raw_positions.items()
    }


@dataclass
class LayoutResult:
    positions: dict                       # cluster path -> (x, y)
    discipline_graph: WeightedGraph       # sibling-scaled, as laid out
    specialty_graphs: dict                # discipline path -> sibling subgraph


def prepare_map_graphs(
    tree,
    discipline_graph: WeightedGraph,
    specialty_graph: WeightedGraph,
    sibling_factor: float = DEFAULT_SIBLING_FACTOR,
) -> tuple[WeightedGraph, dict]:
    """Sibling-scaled discipline graph plus per-discipline sibling subgraphs.

    Shared by the layout run and by map assembly, so positions loaded from a
    checkpoint pair with exactly the graphs that produced them.
    """
    parent_of = {c.path: c.parent_path for c in tree.level("discipline").clusters}
    scaled = scale_sibling_edges(discipline_graph, parent_of, sibling_factor)

    children_of: dict[str, list[str]] = {}
    for c in tree.level("specialty").clusters:
        children_of.setdefault(c.parent_path, []).append(c.path)
    spec_index = {node: i for i, node in enumerate(specialty_graph.nodes)}
    subgraphs = {
        disc: _induced_subgraph(specialty_graph, spec_index,
                                sorted(children_of[disc], key=_path_key))
        for disc in sorted(children_of, key=_path_key)
    }
    return scaled, subgraphs


def layout_hierarchy(
    tree,
    discipline_graph: WeightedGraph,
    specialty_graph: WeightedGraph,
    presets: dict[str, LayoutParams] | None = None,
    seed: int = 0,
    m: float = DEFAULT_CHILD_EXPANSION,
    sibling_factor: float = DEFAULT_SIBLING_FACTOR,
) -> LayoutResult:
    """Positions for all disciplines and specialties.

    Disciplines are laid out once on the sibling-scaled discipline graph
    (siblings share a research area). Each discipline's children are laid
    out independently on their sibling subgraph of the specialty graph, then
    recentered on the parent via :func:`place_children`.
    """
    presets = presets or PRESETS
    scaled, specialty_graphs = prepare_map_graphs(
        tree, discipline_graph, specialty_graph, sibling_factor)
    positions = dict(force_atlas(scaled, presets["discipline"], seed=seed))

    for d_idx, disc in enumerate(sorted(specialty_graphs, key=_path_key)):
        sub = specialty_graphs[disc]
        raw = force_atlas(sub, presets["specialty"], seed=seed + 1 + d_idx)
        placed = place_children(raw, positions[disc], m=m)
        positions.update(placed)

    return LayoutResult(positions=positions, discipline_graph=scaled,
                        specialty_graphs=specialty_graphs)


def _induced_subgraph(graph: WeightedGraph, index: dict, nodes: list) -> WeightedGraph:
    sub_index = {node: i for i, node in enumerate(nodes)}
    edges = {}
    for (u, v), w in graph.edges.items():
        nu, nv = graph.nodes[u], graph.nodes[v]
        if nu in sub_index and nv in sub_index:
            a, b = sub_index[nu], sub_index[nv]
            edges[(min(a, b), max(a, b))] = w
    weights = [graph.node_weights[index[node]] for node in nodes]
    return WeightedGraph(nodes=list(nodes), node_weights=weights, edges=edges)


def save_positions(positions: dict, path) -> None:
    from pathlib import Path

    with Path(path).open("w", encoding="utf-8") as fh:
        for node in sorted(positions, key=_path_key):
            x, y = positions[node]
            fh.write(f"{node}\t{x!r}\t{y!r}\n")


def load_positions(path) -> dict:
    from pathlib import Path

    out = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                node, x, y = line.rstrip("\n").split("\t")
                out[node] = (float(x), float(y))
    return out


def _path_key(path: str) -> tuple:
    return tuple(int(p) for p in str(path).split("."))

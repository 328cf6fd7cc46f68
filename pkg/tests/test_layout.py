import math
import random

import numpy as np
import pytest

from sciatlas.citegraph import WeightedGraph
from sciatlas.layout import (
    PRESETS,
    LayoutParams,
    _repulsion_barnes_hut,
    _repulsion_exact,
    force_atlas,
    layout_hierarchy,
    load_positions,
    place_children,
    save_positions,
    scale_sibling_edges,
)
from sciatlas.leiden import ClusterInfo, ClusterTree, TreeLevel

from oracles import make_graph


def dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


class TestPresets:
    def test_discipline_preset_values(self):
        p = PRESETS["discipline"]
        assert (p.iterations, p.inertia, p.repulsion_strength, p.attraction_strength,
                p.gravity) == (10_000, 0.1, 500.0, 10.0, 30.0)
        assert (p.max_displacement, p.freeze_balance, p.freeze_strength,
                p.freeze_inertia, p.speed, p.cooling) == (10.0, True, 80.0, 0.2, 1.0, 1.0)
        assert p.outbound_attraction is False and p.adjust_sizes is False

    def test_specialty_preset_values(self):
        p = PRESETS["specialty"]
        assert (p.repulsion_strength, p.attraction_strength, p.gravity) == (2000.0, 20.0, 10.0)
        assert p.iterations == 10_000

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            LayoutParams(iterations=0)
        with pytest.raises(ValueError):
            LayoutParams(repulsion_strength=-1)


class TestPlaceChildren:
    def test_spec_example(self):
        raw = {"a": (-4.0, 0.0), "b": (4.0, 0.0)}
        placed = place_children(raw, (10.0, 5.0), m=0.5)
        assert placed["a"] == pytest.approx((9.0, 5.0))
        assert placed["b"] == pytest.approx((11.0, 5.0))

    def test_single_child_lands_on_parent(self):
        placed = place_children({"only": (123.4, -56.7)}, (7.0, 8.0), m=0.5)
        assert placed["only"] == (7.0, 8.0)

    def test_centroid_identity(self):
        rng = random.Random(4)
        for _ in range(50):
            n = rng.randint(1, 40)
            raw = {i: (rng.uniform(-100, 100), rng.uniform(-100, 100)) for i in range(n)}
            parent = (rng.uniform(-50, 50), rng.uniform(-50, 50))
            placed = place_children(raw, parent, m=0.5)
            mx = sum(xy[0] for xy in placed.values()) / n
            my = sum(xy[1] for xy in placed.values()) / n
            assert abs(mx - parent[0]) < 1e-9
            assert abs(my - parent[1]) < 1e-9

    def test_affine_in_raw_offsets(self):
        raw = {0: (1.0, 2.0), 1: (-3.0, 4.0), 2: (5.0, -6.0)}
        scaled = {k: (3.0 * x, 3.0 * y) for k, (x, y) in raw.items()}
        p1 = place_children(raw, (0.0, 0.0), m=0.5)
        p2 = place_children(scaled, (0.0, 0.0), m=0.5)
        for k in raw:
            assert p2[k][0] == pytest.approx(3.0 * p1[k][0])
            assert p2[k][1] == pytest.approx(3.0 * p1[k][1])

    def test_empty(self):
        assert place_children({}, (0.0, 0.0)) == {}


class TestScaleSiblingEdges:
    def test_siblings_scaled(self):
        g = make_graph(2, [(0, 1, 0.2)])
        out = scale_sibling_edges(g, {0: "A", 1: "A"}, 3.0)
        assert out.edges[(0, 1)] == pytest.approx(0.6)

    def test_non_siblings_unchanged(self):
        g = make_graph(2, [(0, 1, 0.2)])
        out = scale_sibling_edges(g, {0: "A", 1: "B"}, 3.0)
        assert out.edges[(0, 1)] == pytest.approx(0.2)

    def test_factor_one_identity(self):
        g = make_graph(3, [(0, 1, 0.2), (1, 2, 0.5)])
        out = scale_sibling_edges(g, {0: "A", 1: "A", 2: "A"}, 1.0)
        assert out.edges == g.edges


class TestForceAtlas:
    def params(self, **kw):
        base = dict(iterations=400, inertia=0.1, repulsion_strength=500.0,
                    attraction_strength=10.0, max_displacement=10.0,
                    freeze_balance=True, freeze_strength=80.0, freeze_inertia=0.2,
                    gravity=30.0, speed=1.0, cooling=1.0)
        base.update(kw)
        return LayoutParams(**base)

    def test_empty_graph(self):
        g = make_graph(0, [])
        assert force_atlas(g, self.params(), seed=0) == {}

    def test_single_node_pulled_to_origin(self):
        g = make_graph(1, [])
        out = force_atlas(g, self.params(), seed=0, initial={0: (50.0, 30.0)})
        assert dist(out[0], (0.0, 0.0)) < dist((50.0, 30.0), (0.0, 0.0))
        assert dist(out[0], (0.0, 0.0)) < 3.0

    def test_two_nodes_separate_monotonically(self):
        # small displacement cap keeps steps below the equilibrium distance,
        # so early separation reflects the sign of the net force
        g = make_graph(2, [])
        initial = {0: (-0.5, 0.0), 1: (0.5, 0.0)}
        last = 1.0
        for iters in range(1, 7):
            out = force_atlas(g, self.params(iterations=iters, cooling=0.0,
                                             max_displacement=0.5),
                              seed=0, initial=initial)
            d = dist(out[0], out[1])
            assert d > last - 1e-12
            last = d
        assert last > 1.0

    def test_two_nodes_final_distance_exceeds_initial(self):
        g = make_graph(2, [])
        initial = {0: (-0.5, 0.0), 1: (0.5, 0.0)}
        out = force_atlas(g, self.params(iterations=500), seed=0, initial=initial)
        assert dist(out[0], out[1]) > 1.0

    def test_heavier_edge_smaller_distance(self):
        initial = {0: (-3.0, 0.0), 1: (3.0, 0.0)}
        distances = {}
        for w in (0.5, 1.5):
            g = make_graph(2, [(0, 1, w)])
            out = force_atlas(g, self.params(iterations=800), seed=0, initial=initial)
            distances[w] = dist(out[0], out[1])
        assert distances[1.5] < distances[0.5]

    def test_deterministic_per_seed(self):
        g = make_graph(8, [(i, (i + 1) % 8, 0.5) for i in range(8)])
        a = force_atlas(g, self.params(iterations=100), seed=9)
        b = force_atlas(g, self.params(iterations=100), seed=9)
        assert a == b
        c = force_atlas(g, self.params(iterations=100), seed=10)
        assert a != c

    def test_mirror_symmetry(self):
        g = make_graph(5, [(0, 1, 0.7), (1, 2, 0.4), (2, 3, 0.9), (3, 4, 0.2)])
        rng = random.Random(3)
        initial = {i: (rng.uniform(-5, 5), rng.uniform(-5, 5)) for i in range(5)}
        mirrored = {i: (-x, y) for i, (x, y) in initial.items()}
        out = force_atlas(g, self.params(iterations=50), seed=0, initial=initial)
        out_m = force_atlas(g, self.params(iterations=50), seed=0, initial=mirrored)
        for i in range(5):
            assert abs(out_m[i][0] + out[i][0]) < 1e-9
            assert abs(out_m[i][1] - out[i][1]) < 1e-9

    def test_coordinates_finite(self):
        rng = random.Random(0)
        edges = [(rng.randrange(30), rng.randrange(30), rng.uniform(0.1, 1.0))
                 for _ in range(60)]
        edges = [(u, v, w) for u, v, w in edges if u != v]
        g = make_graph(30, edges)
        out = force_atlas(g, self.params(iterations=300), seed=1)
        for x, y in out.values():
            assert math.isfinite(x) and math.isfinite(y)


class TestBarnesHut:
    def test_close_to_exact(self):
        rng = np.random.default_rng(12)
        pos = rng.uniform(-100, 100, size=(300, 2))
        mass = rng.integers(1, 6, size=300).astype(float)
        exact = _repulsion_exact(pos, mass, 500.0)
        approx = _repulsion_barnes_hut(pos, mass, 500.0)
        err = np.linalg.norm(approx - exact, axis=1)
        scale = np.linalg.norm(exact, axis=1) + 1e-9
        assert np.median(err / scale) < 0.05
        assert (err / scale).max() < 0.5

    def test_large_graph_uses_bh_and_is_deterministic(self, monkeypatch):
        monkeypatch.setattr("sciatlas.layout.BARNES_HUT_THRESHOLD", 50)
        rng = random.Random(5)
        edges = set()
        while len(edges) < 150:
            u, v = rng.randrange(80), rng.randrange(80)
            if u != v:
                edges.add((min(u, v), max(u, v)))
        g = make_graph(80, [(u, v, 0.5) for u, v in sorted(edges)])
        params = LayoutParams(iterations=20)
        a = force_atlas(g, params, seed=2)
        b = force_atlas(g, params, seed=2)
        assert a == b
        for x, y in a.values():
            assert math.isfinite(x) and math.isfinite(y)


def toy_tree(disciplines):
    """Minimal two-level tree: {disc_path: (area_path, [specialty paths])}."""
    disc_clusters = []
    spec_clusters = []
    spec_assignment = {}
    for disc, (area, specs) in disciplines.items():
        disc_clusters.append(ClusterInfo(path=disc, level="discipline", size=100,
                                         parent_path=area, members=list(specs)))
        for sp in specs:
            spec_clusters.append(ClusterInfo(path=sp, level="specialty", size=10,
                                             parent_path=disc, members=[]))
            spec_assignment[sp] = disc
    area_paths = sorted({area for area, _ in disciplines.values()})
    area_clusters = [ClusterInfo(path=a, level="research_area", size=100,
                                 parent_path=None, members=[]) for a in area_paths]
    return ClusterTree(levels=[
        TreeLevel(name="specialty", assignment=spec_assignment, clusters=spec_clusters),
        TreeLevel(name="discipline",
                  assignment={d: a for d, (a, _) in disciplines.items()},
                  clusters=disc_clusters),
        TreeLevel(name="research_area", assignment={}, clusters=area_clusters),
    ])


def quick_presets(iters=150):
    return {
        "discipline": LayoutParams(iterations=iters),
        "specialty": LayoutParams(iterations=iters, repulsion_strength=2000.0,
                                  attraction_strength=20.0, gravity=10.0),
    }


class TestLayoutHierarchy:
    def setup_graphs(self):
        tree = toy_tree({
            "1.1": ("1", ["1.1.1", "1.1.2"]),
            "1.2": ("1", ["1.2.1"]),
            "2.1": ("2", ["2.1.1", "2.1.2", "2.1.3"]),
        })
        dg = WeightedGraph(nodes=["1.1", "1.2", "2.1"], node_weights=[100, 100, 100],
                           edges={(0, 1): 0.2, (1, 2): 0.05})
        sg_nodes = ["1.1.1", "1.1.2", "1.2.1", "2.1.1", "2.1.2", "2.1.3"]
        sg = WeightedGraph(nodes=sg_nodes, node_weights=[10] * 6,
                           edges={(0, 1): 0.3, (3, 4): 0.2, (4, 5): 0.1, (2, 3): 0.01})
        return tree, dg, sg

    def test_single_specialty_at_parent(self):
        tree, dg, sg = self.setup_graphs()
        result = layout_hierarchy(tree, dg, sg, quick_presets(), seed=0)
        assert result.positions["1.2.1"] == pytest.approx(result.positions["1.2"])

    def test_deterministic(self):
        tree, dg, sg = self.setup_graphs()
        a = layout_hierarchy(tree, dg, sg, quick_presets(), seed=7)
        b = layout_hierarchy(tree, dg, sg, quick_presets(), seed=7)
        assert a.positions == b.positions

    def test_sibling_scaling_applied(self):
        tree, dg, sg = self.setup_graphs()
        result = layout_hierarchy(tree, dg, sg, quick_presets(), seed=0,
                                  sibling_factor=3.0)
        # 1.1 and 1.2 share research area 1 -> edge scaled; 1.2-2.1 crosses areas
        i, j = result.discipline_graph.index_of("1.1"), result.discipline_graph.index_of("1.2")
        assert result.discipline_graph.edges[(min(i, j), max(i, j))] == pytest.approx(0.6)
        i, j = result.discipline_graph.index_of("1.2"), result.discipline_graph.index_of("2.1")
        assert result.discipline_graph.edges[(min(i, j), max(i, j))] == pytest.approx(0.05)

    def test_child_layouts_independent(self):
        tree, dg, sg = self.setup_graphs()
        before = layout_hierarchy(tree, dg, sg, quick_presets(), seed=3)
        # perturb an edge inside discipline 2.1's sibling network
        sg2 = WeightedGraph(nodes=list(sg.nodes), node_weights=list(sg.node_weights),
                            edges=dict(sg.edges))
        sg2.edges[(3, 4)] = 0.9
        after = layout_hierarchy(tree, dg, sg2, quick_presets(), seed=3)
        for path in ("1.1.1", "1.1.2", "1.2.1"):
            assert after.positions[path] == before.positions[path]
        assert after.positions["2.1.1"] != before.positions["2.1.1"]

    def test_children_centroid_on_parent(self):
        tree, dg, sg = self.setup_graphs()
        result = layout_hierarchy(tree, dg, sg, quick_presets(), seed=1)
        kids = ["2.1.1", "2.1.2", "2.1.3"]
        cx = sum(result.positions[k][0] for k in kids) / 3
        cy = sum(result.positions[k][1] for k in kids) / 3
        px, py = result.positions["2.1"]
        assert abs(cx - px) < 1e-9 and abs(cy - py) < 1e-9


def test_positions_roundtrip(tmp_path):
    positions = {"1": (1.234567890123, -9.87654321), "1.2": (0.0, 5.5)}
    path = tmp_path / "pos.tsv"
    save_positions(positions, path)
    assert load_positions(path) == positions

"""Shared fixtures: a small synthetic world run through the whole pipeline."""

import pytest

from sciatlas.citegraph import aggregate_graph, build_normalized_graph
from sciatlas.labeler import label_tree
from sciatlas.layout import LayoutParams, layout_hierarchy
from sciatlas.leiden import LevelSpec, build_hierarchy
from sciatlas.mapbuild import build_base_map, node_membership
from sciatlas.synthgen import SynthSpec, generate

WORLD_SPEC = SynthSpec(
    n_areas=2, disciplines_per_area=2, specialties_per_discipline=2,
    topics_per_specialty=3, pubs_per_topic=14,
    cites_same_topic=4, cites_same_specialty=2,
    p_cite_same_discipline=1.0, p_cite_same_area=0.3, p_cite_anywhere=0.05,
)

WORLD_LEVELS = [
    LevelSpec("topic", 2e-2, 6, "reassign_nodes"),
    LevelSpec("specialty", 3e-5, 0, "merge_clusters"),
    LevelSpec("discipline", 3e-7, 0, "merge_clusters"),
    LevelSpec("research_area", 1e-8, 0, "merge_clusters"),
]

WORLD_PRESETS = {
    "discipline": LayoutParams(iterations=300),
    "specialty": LayoutParams(iterations=300, repulsion_strength=2000.0,
                              attraction_strength=20.0, gravity=10.0),
}


class World:
    def __init__(self):
        self.synth = generate(WORLD_SPEC, seed=5)
        self.corpus = self.synth.corpus
        self.graph = build_normalized_graph(self.corpus)
        self.tree = build_hierarchy(self.corpus, self.graph, WORLD_LEVELS, seed=1)
        self.labels = label_tree(self.corpus, self.tree)
        disc_graph = aggregate_graph(self.graph, self.tree.pub_assignment("discipline"))
        spec_graph = aggregate_graph(self.graph, self.tree.pub_assignment("specialty"))
        self.layout = layout_hierarchy(self.tree, disc_graph, spec_graph,
                                       WORLD_PRESETS, seed=2)
        self.base_map = build_base_map(self.tree, self.labels, self.layout, self.corpus)
        self.membership = node_membership(self.tree)


@pytest.fixture(scope="session")
def world():
    return World()

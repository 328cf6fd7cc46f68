"""Assemble the renderable base map from tree, labels, positions and corpus.

Node attributes follow the map's display contract: dotted id, "a; b; c"
label, size = sqrt(publications) for disciplines and sqrt(publications)/2
for specialties, an rgba color shared across each research area, up to seven
additional terms, PubMed hyperlinks in batches of 500 (a plain-text sentinel
above 5,000 publications), and an HTML children list with per-child links.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field

from .corpus import Corpus, pub_sort_key
from .labeler import ClusterLabel
from .layout import LayoutResult
from .leiden import ClusterTree, path_sort_key

DEFAULT_PUBMED_URL = "https://pubmed.ncbi.nlm.nih.gov/"
HYPERLINK_BATCH = 500
HYPERLINK_MAX = 5000
DEFAULT_TOP_K_EDGES = 5

COLOR_SATURATION = 0.65
COLOR_LIGHTNESS = 0.45
COLOR_ALPHA = 0.5

LEVEL_DISPLAY = {"discipline": "Discipline", "specialty": "Specialty"}


class MapBuildError(Exception):
    pass


@dataclass
class MapNode:
    id: str
    label: str
    size: float
    color: str
    additional_terms: tuple[str, ...]
    level: str                      # "Discipline" or "Specialty"
    publ_count: int
    hyperlinks: list[tuple[str, str]] | str
    children_summary: str
    x: float
    y: float
    hidden: bool = False
    overlay_value: float | None = None
    overlay_count: int | None = None


@dataclass
class MapEdge:
    source: str
    target: str
    weight: float


@dataclass
class BaseMap:
    nodes: list[MapNode]
    edges: list[MapEdge]
    metadata: dict = field(default_factory=dict)

    def node(self, node_id: str) -> MapNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


def node_size(publ_count: float, level: str) -> float:
    """sqrt of the count; specialties rescaled by half for readability."""
    size = math.sqrt(publ_count)
    if level.lower() == "specialty":
        size /= 2.0
    return size


def _require_levels(tree: ClusterTree, names: tuple[str, ...]) -> None:
    missing = [n for n in names if n not in tree.level_names()]
    if missing:
        raise MapBuildError(
            f"map building needs the level(s) {', '.join(missing)}; "
            f"tree has {', '.join(tree.level_names())}")


def assign_colors(tree: ClusterTree) -> dict[str, str]:
    """One hue per research area, evenly spaced; shared down the hierarchy."""
    _require_levels(tree, ("research_area",))
    areas = [c.path for c in tree.level("research_area").clusters]
    areas.sort(key=path_sort_key)
    area_color = {}
    for i, area in enumerate(areas):
        hue = i / max(1, len(areas))
        r, g, b = colorsys.hls_to_rgb(hue, COLOR_LIGHTNESS, COLOR_SATURATION)
        area_color[area] = "rgba(%d,%d,%d,%s)" % (
            round(r * 255), round(g * 255), round(b * 255), COLOR_ALPHA)

    colors = dict(area_color)
    for level_name in ("discipline", "specialty"):
        try:
            level = tree.level(level_name)
        except KeyError:
            continue
        for cluster in level.clusters:
            parent = cluster.parent_path
            colors[cluster.path] = colors[parent]
    return colors


def make_hyperlinks(pmids: list[str], base_url: str = DEFAULT_PUBMED_URL,
                    ) -> list[tuple[str, str]] | str:
    """Batched PubMed links, or the sentinel text above the hyperlink cap.

    IDs are sorted ascending; each batch of up to 500 becomes one link whose
    label is the 1-based range it covers ("1-500", "501-1000", ..., the last
    one ending at the total count).
    """
    count = len(pmids)
    if count > HYPERLINK_MAX:
        return f"Too many publ. ({count})"
    if count == 0:
        return []
    ordered = sorted(pmids, key=pub_sort_key)
    links = []
    for start in range(0, count, HYPERLINK_BATCH):
        batch = ordered[start:start + HYPERLINK_BATCH]
        label = f"{start + 1}-{start + len(batch)}"
        query = "+OR+".join(f"{pmid}[uid]" for pmid in batch)
        links.append((label, f"{base_url}?term={query}"))
    return links


def _links_html(links: list[tuple[str, str]] | str) -> str:
    if isinstance(links, str):
        return links
    return " ".join(f'<a href="{url}">{label}</a>' for label, url in links)


def children_summary_html(children: list[tuple[str, int, list | str]]) -> str:
    """HTML list of (label, publication count, hyperlinks) child entries."""
    items = []
    for label, count, links in children:
        links_html = _links_html(links)
        suffix = f" {links_html}" if links_html else ""
        items.append(f"<li>● {label} - # Publ.: {count}{suffix}</li>")
    return '<ul style="list-style-type: none">' + "".join(items) + "</ul>"


def node_membership(tree: ClusterTree, level_names=("discipline", "specialty"),
                    ) -> dict[str, list[str]]:
    """Publication ids under each cluster path, for the displayed levels."""
    members: dict[str, list[str]] = {}
    for name in level_names:
        assignment = tree.pub_assignment(name)
        per_path: dict[str, list[str]] = {}
        for pub, path in assignment.items():
            per_path.setdefault(path, []).append(pub)
        for path, pubs in per_path.items():
            members[path] = sorted(pubs, key=pub_sort_key)
    return members


def _top_k_edge_filter(graph, top_k: int) -> list[tuple[str, str, float]]:
    """Keep an edge iff it ranks in the top-k by weight for either endpoint."""
    if top_k <= 0:
        return []
    incident: dict[int, list[tuple[float, tuple[int, int]]]] = {}
    for (u, v), w in graph.edges.items():
        incident.setdefault(u, []).append((w, (u, v)))
        incident.setdefault(v, []).append((w, (u, v)))
    keep: set[tuple[int, int]] = set()
    for node, pairs in incident.items():
        pairs.sort(key=lambda t: (-t[0], t[1]))
        for _, key in pairs[:top_k]:
            keep.add(key)
    out = []
    for (u, v) in sorted(keep):
        out.append((graph.nodes[u], graph.nodes[v], graph.edges[(u, v)]))
    return out


def build_base_map(
    tree: ClusterTree,
    labels: dict[str, dict[str, ClusterLabel]],
    layout: LayoutResult,
    corpus: Corpus,
    base_url: str = DEFAULT_PUBMED_URL,
    top_k_edges: int = DEFAULT_TOP_K_EDGES,
    metadata: dict | None = None,
) -> BaseMap:
    """Pure assembly of the display map for disciplines and specialties.

    Raises if any displayed cluster is missing a label or a position. The
    children summary of a discipline lists its specialties; a specialty
    lists its topics. Output ordering is sorted by id, so identical inputs
    serialize byte-identically.
    """
    _require_levels(tree, ("topic", "specialty", "discipline", "research_area"))
    members = node_membership(tree)
    positions = layout.positions
    colors = assign_colors(tree)

    topic_labels = labels.get("topic", {})
    topic_members: dict[str, list[str]] = {}
    for pub, path in tree.pub_assignment("topic").items():
        topic_members.setdefault(path, []).append(pub)
    topic_members = {p: sorted(m, key=pub_sort_key) for p, m in topic_members.items()}

    nodes: list[MapNode] = []
    for level_name in ("discipline", "specialty"):
        level = tree.level(level_name)
        level_labels = labels.get(level_name, {})
        for cluster in level.clusters:
            label = level_labels.get(cluster.path)
            if label is None:
                raise MapBuildError(f"no label for {level_name} {cluster.path}")
            pos = positions.get(cluster.path)
            if pos is None:
                raise MapBuildError(f"no position for {level_name} {cluster.path}")

            pubs = members.get(cluster.path, [])
            children = []
            if level_name == "discipline":
                child_level = tree.level("specialty")
                child_labels = labels.get("specialty", {})
                child_members = members
            else:
                child_level = tree.level("topic")
                child_labels = topic_labels
                child_members = topic_members
            for child in child_level.clusters:
                if child.parent_path != cluster.path:
                    continue
                child_label = child_labels.get(child.path)
                text = child_label.label if child_label else child.path
                links = make_hyperlinks(child_members.get(child.path, []), base_url)
                children.append((text, child.size, links))
            children.sort(key=lambda t: (-t[1], t[0]))

            nodes.append(MapNode(
                id=cluster.path,
                label=label.label,
                size=node_size(cluster.size, level_name),
                color=colors[cluster.path],
                additional_terms=tuple(label.additional_terms),
                level=LEVEL_DISPLAY[level_name],
                publ_count=cluster.size,
                hyperlinks=make_hyperlinks(pubs, base_url),
                children_summary=children_summary_html(children),
                x=pos[0],
                y=pos[1],
            ))
    nodes.sort(key=lambda n: path_sort_key(n.id))

    edges: list[MapEdge] = []
    for source, target, weight in _top_k_edge_filter(layout.discipline_graph, top_k_edges):
        edges.append(MapEdge(source, target, weight))
    for disc in sorted(layout.specialty_graphs, key=path_sort_key):
        sub = layout.specialty_graphs[disc]
        for source, target, weight in _top_k_edge_filter(sub, top_k_edges):
            edges.append(MapEdge(source, target, weight))
    edges.sort(key=lambda e: (path_sort_key(e.source), path_sort_key(e.target)))

    meta = {"kind": "base", "node_levels": ["Discipline", "Specialty"]}
    if metadata:
        meta.update(metadata)
    return BaseMap(nodes=nodes, edges=edges, metadata=meta)

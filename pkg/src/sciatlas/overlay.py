"""Overlay projections onto a frozen base map.

Overlays never move nodes: coordinates are copied from the base map so any
two maps remain visually comparable. Three projections are supported:
subset sizing (node area follows the subset's distribution, empty nodes are
hidden but keep their place), metric coloring (per-cluster mean of a
per-publication value, rates for booleans), and the cited-by analysis (node
size from distinct cited publications, color from citation links per cited
publication).
"""

from __future__ import annotations

from dataclasses import replace

from .corpus import CitationEdge, pub_sort_key
from .mapbuild import DEFAULT_PUBMED_URL, BaseMap, make_hyperlinks, node_size

OPEN_ACCESS_STATUSES = frozenset({"gold", "bronze", "green", "hybrid"})

# low -> green around 0.3 -> yellow at the top; fully configurable
DEFAULT_GRADIENT: tuple[tuple[float, tuple[int, int, int]], ...] = (
    (0.0, (178, 24, 43)),
    (0.3, (77, 175, 74)),
    (1.0, (255, 255, 51)),
)
NEUTRAL_COLOR = "rgba(160,160,160,0.5)"
OVERLAY_ALPHA = 0.5


class OverlayError(Exception):
    pass


def classify_open_access(status: str | None) -> bool:
    """True iff the status names one of the openly-available categories."""
    return status is not None and status.lower() in OPEN_ACCESS_STATUSES


def oa_metric(corpus, include_unknown: bool = True) -> dict[str, bool]:
    """Per-publication open-access flags.

    With ``include_unknown`` (default) publications with unknown status count
    as not open; otherwise they are left out of the metric entirely, which
    shrinks rate denominators.
    """
    metric: dict[str, bool] = {}
    for pub_id, record in corpus.publications.items():
        if record.oa_status == "unknown" and not include_unknown:
            continue
        metric[pub_id] = classify_open_access(record.oa_status)
    return metric


def evaluate_gradient(stops, t: float, alpha: float = OVERLAY_ALPHA) -> str:
    """Piecewise-linear interpolation over ordered (position, rgb) stops."""
    stops = sorted(stops, key=lambda s: s[0])
    if not stops:
        raise OverlayError("gradient needs at least one stop")
    t = min(max(t, stops[0][0]), stops[-1][0])
    for (a, ca), (b, cb) in zip(stops, stops[1:]):
        if a <= t <= b:
            f = 0.0 if b == a else (t - a) / (b - a)
            rgb = tuple(round(ca[i] + f * (cb[i] - ca[i])) for i in range(3))
            return "rgba(%d,%d,%d,%s)" % (*rgb, alpha)
    c = stops[0][1] if t <= stops[0][0] else stops[-1][1]
    return "rgba(%d,%d,%d,%s)" % (*c, alpha)


def _overlay_metadata(base: BaseMap, mode: str, extra: dict | None = None) -> dict:
    meta = dict(base.metadata)
    meta["kind"] = "overlay"
    meta["overlay_mode"] = mode
    if extra:
        meta.update(extra)
    return meta


def project_subset(
    base: BaseMap,
    subset: set[str],
    membership: dict[str, list[str]],
    base_url: str | None = None,
) -> BaseMap:
    """Resize nodes by the subset's distribution; empty nodes are hidden.

    Hyperlinks are recomputed over the subset members so a click retrieves
    the projected publications rather than the whole cluster.
    """
    nodes = []
    for node in base.nodes:
        members = membership.get(node.id, [])
        picked = sorted((p for p in members if p in subset), key=pub_sort_key)
        n_sub = len(picked)
        links = make_hyperlinks(picked, base_url or DEFAULT_PUBMED_URL)
        nodes.append(replace(
            node,
            size=node_size(n_sub, node.level),
            hidden=n_sub == 0,
            overlay_count=n_sub,
            overlay_value=None,
            hyperlinks=links,
        ))
    return BaseMap(nodes=nodes, edges=list(base.edges),
                   metadata=_overlay_metadata(base, "subset_size",
                                              {"subset_size": len(subset)}))


def color_by_metric(
    base: BaseMap,
    metric: dict[str, float | bool],
    membership: dict[str, list[str]],
    gradient=DEFAULT_GRADIENT,
    metric_range: tuple[float, float] | None = None,
    neutral_color: str = NEUTRAL_COLOR,
) -> BaseMap:
    """Color nodes by the mean metric over their publications.

    Boolean metrics yield rates in [0, 1]; real metrics normalize over
    ``metric_range`` (observed min/max when not given). Clusters with no
    publication carrying the metric keep a neutral color.
    """
    values: dict[str, float | None] = {}
    for node in base.nodes:
        covered = [float(metric[p]) for p in membership.get(node.id, []) if p in metric]
        values[node.id] = sum(covered) / len(covered) if covered else None

    if metric_range is None:
        if all(isinstance(v, bool) for v in metric.values()) and metric:
            metric_range = (0.0, 1.0)
        else:
            defined = [v for v in values.values() if v is not None]
            if not defined:
                metric_range = (0.0, 1.0)
            else:
                lo, hi = min(defined), max(defined)
                metric_range = (lo, hi if hi > lo else lo + 1.0)
    lo, hi = metric_range
    if hi <= lo:
        raise OverlayError("metric_range must be increasing")

    nodes = []
    for node in base.nodes:
        value = values[node.id]
        if value is None:
            color = neutral_color
        else:
            color = evaluate_gradient(gradient, (value - lo) / (hi - lo))
        nodes.append(replace(node, color=color, overlay_value=value))
    return BaseMap(nodes=nodes, edges=list(base.edges),
                   metadata=_overlay_metadata(base, "metric_color",
                                              {"metric_range": list(metric_range)}))


def cited_by_overlay(
    base: BaseMap,
    focal_set: set[str],
    citations: list[CitationEdge],
    membership: dict[str, list[str]],
    year_of: dict[str, int] | None = None,
    year_max: int | None = None,
    gradient=DEFAULT_GRADIENT,
    base_url: str | None = None,
) -> BaseMap:
    """Map of what the focal set cites.

    Node sizes follow the number of distinct publications in the cluster
    cited by the focal set; the overlay value is citation links per cited
    publication (always >= 1 when defined). ``year_max`` drops cited
    publications published after the cutoff.
    """
    cluster_of: dict[str, set[str]] = {}
    for node_id, pubs in membership.items():
        for p in pubs:
            cluster_of.setdefault(p, set()).add(node_id)

    cited: dict[str, set[str]] = {}
    hits: dict[str, int] = {}
    for edge in citations:
        if edge.citing not in focal_set:
            continue
        if year_max is not None and year_of is not None \
                and year_of.get(edge.cited, year_max) > year_max:
            continue
        for node_id in cluster_of.get(edge.cited, ()):
            cited.setdefault(node_id, set()).add(edge.cited)
            hits[node_id] = hits.get(node_id, 0) + 1

    ratios = {nid: hits[nid] / len(cited[nid]) for nid in cited}
    hi = max(ratios.values()) if ratios else 1.0
    lo = 1.0
    span = hi - lo if hi > lo else 1.0

    nodes = []
    for node in base.nodes:
        cited_pubs = sorted(cited.get(node.id, ()), key=pub_sort_key)
        n_cited = len(cited_pubs)
        if n_cited == 0:
            nodes.append(replace(node, size=0.0, hidden=True, overlay_count=0,
                                 overlay_value=None, color=NEUTRAL_COLOR,
                                 hyperlinks=[]))
            continue
        value = ratios[node.id]
        nodes.append(replace(
            node,
            size=node_size(n_cited, node.level),
            hidden=False,
            overlay_count=n_cited,
            overlay_value=value,
            color=evaluate_gradient(gradient, (value - lo) / span),
            hyperlinks=make_hyperlinks(cited_pubs, base_url or DEFAULT_PUBMED_URL),
        ))
    return BaseMap(nodes=nodes, edges=list(base.edges),
                   metadata=_overlay_metadata(base, "cited_by",
                                              {"focal_size": len(focal_set)}))

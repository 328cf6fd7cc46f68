"""Stage orchestration with checkpoint files between stages.

Each stage reads the previous stage's checkpoint and writes its own, so the
expensive steps (clustering above all) run once per corpus. A manifest under
checkpoints/ records the configuration hash per stage; a stage refuses to
run on top of checkpoints produced by a different configuration unless
forced. Bundles embed the hash and seed for provenance.

Stage order: ingest -> cluster -> label -> layout -> build -> export, plus
any configured overlays (also runnable independently).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from . import citegraph, corpus as corpus_mod, export, labeler, layout as layout_mod
from . import leiden, mapbuild, overlay as overlay_mod
from .config import OverlayJob, PipelineConfig

logger = logging.getLogger(__name__)

STAGES = ("ingest", "cluster", "label", "layout", "build", "export")


class StageError(Exception):
    pass


class StaleCheckpointError(StageError):
    pass


def _ckpt(config: PipelineConfig) -> Path:
    return Path(config.output_dir) / "checkpoints"


def _manifest_path(config: PipelineConfig) -> Path:
    return _ckpt(config) / "manifest.json"


def _load_manifest(config: PipelineConfig) -> dict:
    path = _manifest_path(config)
    if not path.is_file():
        return {}
    return json.loads(path.read_text("utf-8"))


def _record_stage(config: PipelineConfig, stage: str, info: dict | None = None) -> None:
    manifest = _load_manifest(config)
    manifest[stage] = {"config_hash": config.config_hash()}
    if info:
        manifest[stage].update(info)
    path = _manifest_path(config)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", "utf-8")


def _require_stage(config: PipelineConfig, stage: str, force: bool) -> None:
    manifest = _load_manifest(config)
    if stage not in manifest:
        raise StageError(
            f"stage '{stage}' has not run: missing checkpoint entry in "
            f"{_manifest_path(config)}")
    recorded = manifest[stage].get("config_hash")
    if recorded != config.config_hash() and not force:
        raise StaleCheckpointError(
            f"checkpoints for stage '{stage}' were built with config hash "
            f"{recorded}, current is {config.config_hash()}; rerun or use --force")


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def run_ingest(config: PipelineConfig, force: bool = False) -> dict:
    ckpt = _ckpt(config)
    ckpt.mkdir(parents=True, exist_ok=True)
    loaded = corpus_mod.load_publications(
        config.publications, year_filter=config.year_filter(),
        strict=config.strict_parse)
    loaded = corpus_mod.load_citations(config.citations, loaded,
                                       strict=config.strict_parse)

    with (ckpt / "corpus.jsonl").open("w", encoding="utf-8") as fh:
        for pid in loaded.pub_ids():
            rec = loaded.publications[pid]
            fh.write(json.dumps({
                "pub_id": rec.pub_id, "year": rec.year, "title": rec.title,
                "journal_title": rec.journal_title,
                "mesh_terms": list(rec.mesh_terms),
                "author_addresses": list(rec.author_addresses),
                "pub_type": rec.pub_type, "oa_status": rec.oa_status,
            }, sort_keys=True) + "\n")
    with (ckpt / "citations.tsv").open("w", encoding="utf-8") as fh:
        for edge in sorted(loaded.citations,
                           key=lambda e: (corpus_mod.pub_sort_key(e.citing),
                                          corpus_mod.pub_sort_key(e.cited))):
            fh.write(f"{edge.citing}\t{edge.cited}\n")
    counts = {
        "publications": loaded.publication_report.as_dict(),
        "citations": loaded.citation_report.as_dict(),
    }
    (ckpt / "counts.json").write_text(
        json.dumps(counts, indent=1, sort_keys=True) + "\n", "utf-8")
    _record_stage(config, "ingest",
                  {"publications": len(loaded), "citations": len(loaded.citations)})
    return {"stage": "ingest", "publications": len(loaded),
            "citations": len(loaded.citations), "counts": counts}


def load_checkpoint_corpus(config: PipelineConfig) -> corpus_mod.Corpus:
    ckpt = _ckpt(config)
    pubs_path = ckpt / "corpus.jsonl"
    if not pubs_path.is_file():
        raise StageError(f"missing checkpoint file {pubs_path}; run ingest first")
    loaded = corpus_mod.load_publications(pubs_path, year_filter=(0, 9999))
    return corpus_mod.load_citations(ckpt / "citations.tsv", loaded)


def run_cluster(config: PipelineConfig, force: bool = False) -> dict:
    _require_stage(config, "ingest", force)
    loaded = load_checkpoint_corpus(config)
    graph = citegraph.build_normalized_graph(loaded)
    tree = leiden.build_hierarchy(loaded, graph, config.levels, seed=config.seed,
                                  max_iterations=config.leiden_iterations)
    leiden.save_tree(tree, _ckpt(config) / "tree")
    sizes = {lvl.name: len(lvl.clusters) for lvl in tree.levels}
    _record_stage(config, "cluster", {"clusters": sizes})
    return {"stage": "cluster", "clusters": sizes}


def _load_tree(config: PipelineConfig) -> leiden.ClusterTree:
    tree_dir = _ckpt(config) / "tree"
    if not (tree_dir / "clusters.tsv").is_file():
        raise StageError(f"missing checkpoint file {tree_dir / 'clusters.tsv'}; "
                         f"run cluster first")
    return leiden.load_tree(tree_dir, [lvl.name for lvl in config.levels])


def run_label(config: PipelineConfig, force: bool = False) -> dict:
    _require_stage(config, "cluster", force)
    loaded = load_checkpoint_corpus(config)
    tree = _load_tree(config)
    stoplist = labeler.load_stoplist(config.stoplist)
    labels = labeler.label_tree(loaded, tree, config.label, stoplist,
                                pretagged_path=config.pretagged)
    labeler.save_labels(labels, _ckpt(config) / "labels")
    _record_stage(config, "label")
    return {"stage": "label", "levels": sorted(labels)}


def map_graphs(tree: leiden.ClusterTree, graph: citegraph.WeightedGraph):
    """Discipline and specialty relation networks for the map.

    Both aggregate the publication graph directly, so edge weights are the
    average normalized citation value per publication pair.
    """
    disc = citegraph.aggregate_graph(graph, tree.pub_assignment("discipline"))
    spec = citegraph.aggregate_graph(graph, tree.pub_assignment("specialty"))
    return disc, spec


def run_layout(config: PipelineConfig, force: bool = False) -> dict:
    _require_stage(config, "cluster", force)
    loaded = load_checkpoint_corpus(config)
    tree = _load_tree(config)
    graph = citegraph.build_normalized_graph(loaded)
    disc_graph, spec_graph = map_graphs(tree, graph)
    result = layout_mod.layout_hierarchy(
        tree, disc_graph, spec_graph, config.layout_presets, seed=config.seed,
        m=config.child_expansion, sibling_factor=config.sibling_factor)
    layout_mod.save_positions(result.positions, _ckpt(config) / "positions.tsv")
    _record_stage(config, "layout", {"positions": len(result.positions)})
    return {"stage": "layout", "positions": len(result.positions)}


def _layout_result(config: PipelineConfig, tree, graph) -> layout_mod.LayoutResult:
    """Reassemble the layout stage's graphs around checkpointed positions."""
    positions_path = _ckpt(config) / "positions.tsv"
    if not positions_path.is_file():
        raise StageError(f"missing checkpoint file {positions_path}; run layout first")
    positions = layout_mod.load_positions(positions_path)
    disc_graph, spec_graph = map_graphs(tree, graph)
    scaled, sub = layout_mod.prepare_map_graphs(tree, disc_graph, spec_graph,
                                                config.sibling_factor)
    return layout_mod.LayoutResult(positions=positions, discipline_graph=scaled,
                                   specialty_graphs=sub)


def _map_metadata(config: PipelineConfig) -> dict:
    return {"config_hash": config.config_hash(), "seed": config.seed,
            "year_min": config.year_min, "year_max": config.year_max}


def run_build(config: PipelineConfig, force: bool = False) -> dict:
    for stage in ("cluster", "label", "layout"):
        _require_stage(config, stage, force)
    loaded = load_checkpoint_corpus(config)
    tree = _load_tree(config)
    labels = labeler.load_labels(_ckpt(config) / "labels",
                                 [lvl.name for lvl in config.levels])
    graph = citegraph.build_normalized_graph(loaded)
    result = _layout_result(config, tree, graph)
    base_map = mapbuild.build_base_map(
        tree, labels, result, loaded, base_url=config.hyperlink_base_url,
        top_k_edges=config.top_k_edges, metadata=_map_metadata(config))
    (_ckpt(config) / "basemap.json").write_text(export.serialize_map(base_map), "utf-8")
    _record_stage(config, "build", {"nodes": len(base_map.nodes)})
    return {"stage": "build", "nodes": len(base_map.nodes),
            "edges": len(base_map.edges)}


def _bundle_config(config: PipelineConfig, base_map, gradient_stops=None) -> dict:
    legend = []
    seen = {}
    for node in base_map.nodes:
        if node.level == "Discipline":
            area = node.id.split(".")[0]
            seen.setdefault(area, node.color)
    for area in sorted(seen, key=lambda a: int(a)):
        legend.append({"label": f"Research area {area}", "color": seen[area]})
    cfg = {
        "title": config.title,
        "description": config.description,
        "legend": legend,
    }
    if gradient_stops is not None:
        cfg["gradientStops"] = [
            {"at": at, "color": "rgba(%d,%d,%d,0.5)" % tuple(rgb)}
            for at, rgb in gradient_stops
        ]
    return cfg


def run_export(config: PipelineConfig, force: bool = False,
               viewer_assets: str | None = None) -> dict:
    _require_stage(config, "build", force)
    base_path = _ckpt(config) / "basemap.json"
    base_map = export.read_map(base_path)
    out = Path(config.output_dir) / "base"
    export.write_map(base_map, out, config=_bundle_config(config, base_map),
                     viewer_assets=viewer_assets)
    report = export.validate_bundle(out)
    if not report["ok"]:
        raise StageError(f"exported bundle failed validation: {report['errors']}")
    _record_stage(config, "export", {"bundle": str(out)})
    return {"stage": "export", "bundle": str(out), "validation": report}


def run_overlay(config: PipelineConfig, job: OverlayJob, force: bool = False,
                viewer_assets: str | None = None) -> dict:
    _require_stage(config, "build", force)
    loaded = load_checkpoint_corpus(config)
    tree = _load_tree(config)
    base_map = export.read_map(_ckpt(config) / "basemap.json")
    membership = mapbuild.node_membership(tree)

    if job.mode == "subset_size":
        subset, _ = corpus_mod.load_subset(job.subset, loaded)
        result = overlay_mod.project_subset(base_map, subset, membership,
                                            base_url=config.hyperlink_base_url)
        gradient = None
    elif job.mode == "metric_color":
        if job.metric == "oa_status":
            metric = overlay_mod.oa_metric(loaded, include_unknown=job.include_unknown)
        else:
            metric = corpus_mod.load_metric(job.metric)
        result = overlay_mod.color_by_metric(base_map, metric, membership)
        gradient = overlay_mod.DEFAULT_GRADIENT
    else:  # cited_by
        focal, _ = corpus_mod.load_subset(job.subset, loaded)
        year_of = {p: r.year for p, r in loaded.publications.items()}
        result = overlay_mod.cited_by_overlay(
            base_map, focal, loaded.citations, membership,
            year_of=year_of, year_max=job.year_max,
            base_url=config.hyperlink_base_url)
        gradient = overlay_mod.DEFAULT_GRADIENT

    result.metadata["overlay_name"] = job.name
    out = Path(config.output_dir) / "overlays" / job.name
    cfg = _bundle_config(config, result, gradient_stops=gradient)
    cfg["title"] = f"{config.title} - {job.name}"
    export.write_map(result, out, config=cfg, viewer_assets=viewer_assets)
    report = export.validate_bundle(out)
    if not report["ok"]:
        raise StageError(f"overlay bundle failed validation: {report['errors']}")
    _record_stage(config, f"overlay:{job.name}", {"bundle": str(out)})
    return {"stage": "overlay", "name": job.name, "bundle": str(out),
            "validation": report}


def run_all(config: PipelineConfig, force: bool = False,
            viewer_assets: str | None = None) -> list[dict]:
    reports = [
        run_ingest(config, force),
        run_cluster(config, force),
        run_label(config, force),
        run_layout(config, force),
        run_build(config, force),
        run_export(config, force, viewer_assets=viewer_assets),
    ]
    for job in config.overlays:
        reports.append(run_overlay(config, job, force, viewer_assets=viewer_assets))
    return reports


def run_stage(config: PipelineConfig, stage: str, force: bool = False,
              viewer_assets: str | None = None):
    if stage == "all":
        return run_all(config, force, viewer_assets=viewer_assets)
    runners = {
        "ingest": run_ingest,
        "cluster": run_cluster,
        "label": run_label,
        "layout": run_layout,
        "build": run_build,
    }
    if stage in runners:
        return runners[stage](config, force)
    if stage == "export":
        return run_export(config, force, viewer_assets=viewer_assets)
    raise StageError(f"unknown stage {stage!r}")

"""Map bundle serialization: data.json + config.json + index.html.

The data file is emitted through a small deterministic writer: keys keep
their construction order, coordinates/sizes/weights/overlay values are
formatted at exactly four decimal places, and nodes/edges are one per line.
Identical maps therefore serialize byte-identically, and parse -> serialize
round-trips bytes exactly.

The host page embeds no data; it loads data.json and config.json at runtime
so a single viewer build (./assets/) serves every bundle.
"""

from __future__ import annotations

import json
import math
import shutil
from importlib import resources
from pathlib import Path

import jsonschema

from .mapbuild import (
    HYPERLINK_BATCH,
    HYPERLINK_MAX,
    BaseMap,
    MapEdge,
    MapNode,
)

BUNDLE_FILES = ("data.json", "config.json", "index.html")

DEFAULT_CONFIG = {
    "title": "Map of science",
    "description": "",
    "legend": [],
    "gradientStops": [],
    "nodeLevelVisibility": {"Discipline": True, "Specialty": True},
    "specialtyLabelZoom": 2.0,
    "maxZoom": 32.0,
    "minZoom": 0.125,
}

INDEX_HTML = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>Map of science</title>
<link rel="stylesheet" href="./assets/style.css">
</head>
<body>
<div id="app"><p id="boot-message">Loading map&hellip;</p></div>
<script type="module">
import { boot } from "./assets/main.js";
boot(document.getElementById("app"), "./data.json", "./config.json");
</script>
</body>
</html>
"""


class ExportError(Exception):
    pass


class Fixed(float):
    """Marker for numbers emitted with exactly four decimal places."""


def _emit(value) -> str:
    if isinstance(value, Fixed):
        return format(float(value), ".4f")
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, float, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ",".join(
            json.dumps(str(k), ensure_ascii=False) + ":" + _emit(v)
            for k, v in value.items()) + "}"
    raise ExportError(f"cannot serialize {type(value).__name__}")


def _node_dict(node: MapNode) -> dict:
    if isinstance(node.hyperlinks, str):
        links = node.hyperlinks
    else:
        links = [{"label": label, "url": url} for label, url in node.hyperlinks]
    return {
        "id": node.id,
        "label": node.label,
        "x": Fixed(node.x),
        "y": Fixed(node.y),
        "size": Fixed(node.size),
        "color": node.color,
        "attributes": {
            "level": node.level,
            "publ_count": node.publ_count,
            "additional_terms": list(node.additional_terms),
            "pubmed_links": links,
            "children": node.children_summary,
            "hidden": node.hidden,
            "overlay_value": None if node.overlay_value is None else Fixed(node.overlay_value),
            "overlay_count": node.overlay_count,
        },
    }


def serialize_map(map_: BaseMap) -> str:
    """Deterministic data.json text for a map."""
    lines = ["{"]
    lines.append('"metadata":' + _emit({k: map_.metadata[k] for k in sorted(map_.metadata)}) + ",")
    lines.append('"nodes":[')
    node_lines = [_emit(_node_dict(n)) for n in map_.nodes]
    lines.append(",\n".join(node_lines))
    lines.append("],")
    lines.append('"edges":[')
    edge_lines = [
        _emit({"id": f"e{i}", "source": e.source, "target": e.target,
               "weight": Fixed(e.weight)})
        for i, e in enumerate(map_.edges)
    ]
    lines.append(",\n".join(edge_lines))
    lines.append("]}")
    return "\n".join(lines) + "\n"


def parse_map(text: str) -> BaseMap:
    """Inverse of :func:`serialize_map` (up to 4-decimal quantization)."""
    obj = json.loads(text)
    nodes = []
    for nd in obj["nodes"]:
        attrs = nd["attributes"]
        raw_links = attrs["pubmed_links"]
        if isinstance(raw_links, str):
            links: list[tuple[str, str]] | str = raw_links
        else:
            links = [(d["label"], d["url"]) for d in raw_links]
        nodes.append(MapNode(
            id=nd["id"],
            label=nd["label"],
            size=float(nd["size"]),
            color=nd["color"],
            additional_terms=tuple(attrs["additional_terms"]),
            level=attrs["level"],
            publ_count=int(attrs["publ_count"]),
            hyperlinks=links,
            children_summary=attrs["children"],
            x=float(nd["x"]),
            y=float(nd["y"]),
            hidden=bool(attrs["hidden"]),
            overlay_value=attrs.get("overlay_value"),
            overlay_count=attrs.get("overlay_count"),
        ))
    edges = [MapEdge(e["source"], e["target"], float(e["weight"])) for e in obj["edges"]]
    return BaseMap(nodes=nodes, edges=edges, metadata=obj["metadata"])


def read_map(path: str | Path) -> BaseMap:
    return parse_map(Path(path).read_text("utf-8"))


def write_map(
    map_: BaseMap,
    output_dir: str | Path,
    config: dict | None = None,
    viewer_assets: str | Path | None = None,
) -> dict:
    """Write the bundle triple (plus viewer assets when available).

    Returns the written paths. config.json is the merged DEFAULT_CONFIG with
    the caller's overrides, serialized with sorted keys.
    """
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        data_path = out / "data.json"
        data_path.write_text(serialize_map(map_), encoding="utf-8")

        merged = dict(DEFAULT_CONFIG)
        merged.update(config or {})
        config_path = out / "config.json"
        config_path.write_text(
            json.dumps(merged, indent=1, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8")

        index_path = out / "index.html"
        index_path.write_text(INDEX_HTML, encoding="utf-8")

        if viewer_assets is not None and Path(viewer_assets).is_dir():
            assets_dir = out / "assets"
            if assets_dir.exists():
                shutil.rmtree(assets_dir)
            shutil.copytree(viewer_assets, assets_dir)
    except OSError as exc:
        raise ExportError(f"cannot write bundle under {out}: {exc}") from exc
    return {"data": data_path, "config": config_path, "index": index_path}


def load_schema() -> dict:
    text = resources.files("sciatlas.data").joinpath("map_schema.json").read_text("utf-8")
    return json.loads(text)


def validate_bundle(directory: str | Path) -> dict:
    """Schema, referential-integrity and display-rule checks for a bundle.

    Returns a machine-readable report: {"ok": bool, "errors": [...],
    "checks": {...}}. Missing files are reported individually.
    """
    directory = Path(directory)
    errors: list[str] = []
    checks: dict[str, int] = {"nodes": 0, "edges": 0}

    for name in BUNDLE_FILES:
        if not (directory / name).is_file():
            errors.append(f"missing file: {name}")
    if errors:
        return {"ok": False, "errors": errors, "checks": checks}

    try:
        data = json.loads((directory / "data.json").read_text("utf-8"))
    except json.JSONDecodeError as exc:
        return {"ok": False, "errors": [f"data.json: invalid JSON ({exc})"], "checks": checks}
    try:
        json.loads((directory / "config.json").read_text("utf-8"))
    except json.JSONDecodeError as exc:
        errors.append(f"config.json: invalid JSON ({exc})")

    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        errors.append(f"schema: {exc.message}")
        return {"ok": False, "errors": errors, "checks": checks}

    ids = [n["id"] for n in data["nodes"]]
    id_set = set(ids)
    if len(ids) != len(id_set):
        errors.append("duplicate node ids")
    checks["nodes"] = len(ids)

    for n in data["nodes"]:
        if n["attributes"]["level"] == "Specialty":
            parent = n["id"].rsplit(".", 1)[0]
            if parent not in id_set:
                errors.append(f"specialty {n['id']}: parent discipline {parent} missing")

    for e in data["edges"]:
        if e["source"] not in id_set or e["target"] not in id_set:
            errors.append(f"edge {e['id']}: endpoint not in nodes "
                          f"({e['source']} -> {e['target']})")
    checks["edges"] = len(data["edges"])

    for n in data["nodes"]:
        attrs = n["attributes"]
        if attrs["hidden"]:
            continue
        count = attrs.get("overlay_count")
        if count is None:
            count = attrs["publ_count"]
        size = n["size"]
        effective = size * 2.0 if attrs["level"] == "Specialty" else size
        tolerance = 2e-4 * max(effective, 1.0) + 1e-6
        if count > 0 and abs(effective * effective - count) > tolerance:
            errors.append(f"node {n['id']}: size {size} inconsistent with count {count}")
        links = attrs["pubmed_links"]
        if count > HYPERLINK_MAX:
            if not (isinstance(links, str) and links.startswith("Too many publ.")):
                errors.append(f"node {n['id']}: expected sentinel for {count} publications")
        elif isinstance(links, list) and count > 0:
            expected = max(1, math.ceil(count / HYPERLINK_BATCH))
            if len(links) != expected:
                errors.append(f"node {n['id']}: {len(links)} links, expected {expected}")
        if not str(attrs["children"]).startswith("<ul"):
            errors.append(f"node {n['id']}: children summary is not a list")

    return {"ok": not errors, "errors": errors, "checks": checks}

import json
import random

from sciatlas.export import (
    parse_map,
    read_map,
    serialize_map,
    validate_bundle,
    write_map,
)
from sciatlas.mapbuild import BaseMap, MapEdge, MapNode
from sciatlas.overlay import color_by_metric, project_subset


def random_map(rng: random.Random, n_nodes=12) -> BaseMap:
    nodes = []
    for i in range(n_nodes):
        level = "Discipline" if i % 2 == 0 else "Specialty"
        count = rng.randint(1, 4000)
        size = count ** 0.5 / (1 if level == "Discipline" else 2)
        pmids = [str(10_000 + k) for k in range(min(count, 40))]
        from sciatlas.mapbuild import make_hyperlinks
        nodes.append(MapNode(
            id=f"{i + 1}" if level == "Discipline" else f"{i}.{i + 1}",
            label=f"term {i}; other {i}",
            size=size,
            color="rgba(104,14,75,0.5)",
            additional_terms=tuple(f"extra{k}" for k in range(rng.randint(0, 7))),
            level=level,
            publ_count=count,
            hyperlinks=make_hyperlinks(pmids),
            children_summary='<ul style="list-style-type: none"><li>● x - # Publ.: 1</li></ul>',
            x=rng.uniform(-500, 500),
            y=rng.uniform(-500, 500),
        ))
    edges = [MapEdge(nodes[0].id, nodes[1].id, rng.uniform(0, 1))]
    return BaseMap(nodes=nodes, edges=edges, metadata={"kind": "base", "seed": 7})


class TestSerializeRoundTrip:
    def test_serialize_parse_serialize_byte_identical(self):
        rng = random.Random(0)
        for trial in range(20):
            original = serialize_map(random_map(rng))
            reparsed = serialize_map(parse_map(original))
            assert reparsed == original

    def test_four_decimal_formatting(self, world):
        text = serialize_map(world.base_map)
        node_line = next(l for l in text.splitlines() if '"x":' in l)
        x_text = node_line.split('"x":')[1].split(",")[0]
        assert len(x_text.split(".")[1]) == 4

    def test_deterministic(self, world):
        assert serialize_map(world.base_map) == serialize_map(world.base_map)

    def test_empty_map(self):
        empty = BaseMap(nodes=[], edges=[], metadata={"kind": "base"})
        back = parse_map(serialize_map(empty))
        assert back.nodes == [] and back.edges == []


class TestWriteMap:
    def test_bundle_triple_written(self, world, tmp_path):
        paths = write_map(world.base_map, tmp_path / "bundle")
        for key in ("data", "config", "index"):
            assert paths[key].is_file()

    def test_config_keys(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b", config={"title": "My map"})
        cfg = json.loads((tmp_path / "b" / "config.json").read_text())
        for key in ("title", "description", "legend", "gradientStops",
                    "nodeLevelVisibility", "maxZoom", "minZoom"):
            assert key in cfg
        assert cfg["title"] == "My map"

    def test_index_references_runtime_files(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        html = (tmp_path / "b" / "index.html").read_text()
        assert "./data.json" in html and "./config.json" in html
        assert "assets/main.js" in html

    def test_viewer_assets_copied(self, world, tmp_path):
        assets = tmp_path / "dist"
        assets.mkdir()
        (assets / "main.js").write_text("export const x = 1;\n")
        write_map(world.base_map, tmp_path / "b", viewer_assets=assets)
        assert (tmp_path / "b" / "assets" / "main.js").is_file()

    def test_deterministic_bytes_on_disk(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "one")
        write_map(world.base_map, tmp_path / "two")
        assert (tmp_path / "one" / "data.json").read_bytes() == \
               (tmp_path / "two" / "data.json").read_bytes()
        assert (tmp_path / "one" / "config.json").read_bytes() == \
               (tmp_path / "two" / "config.json").read_bytes()


class TestValidateBundle:
    def test_fresh_bundle_passes(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        report = validate_bundle(tmp_path / "b")
        assert report["errors"] == []
        assert report["ok"] is True
        assert report["checks"]["nodes"] == len(world.base_map.nodes)

    def test_missing_files_reported_individually(self, tmp_path):
        (tmp_path / "b").mkdir()
        report = validate_bundle(tmp_path / "b")
        assert report["ok"] is False
        assert sorted(report["errors"]) == [
            "missing file: config.json",
            "missing file: data.json",
            "missing file: index.html",
        ]

    def test_corrupted_edge_endpoint_fails(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        data = json.loads((tmp_path / "b" / "data.json").read_text())
        data["edges"][0]["target"] = "nonexistent.9"
        (tmp_path / "b" / "data.json").write_text(json.dumps(data))
        report = validate_bundle(tmp_path / "b")
        assert report["ok"] is False
        assert any("e0" in err for err in report["errors"])

    def test_size_rule_violation_fails(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        data = json.loads((tmp_path / "b" / "data.json").read_text())
        victim = data["nodes"][0]
        victim["size"] = victim["size"] * 3 + 1
        (tmp_path / "b" / "data.json").write_text(json.dumps(data))
        report = validate_bundle(tmp_path / "b")
        assert report["ok"] is False
        assert any(victim["id"] in err and "size" in err for err in report["errors"])

    def test_schema_violation_fails(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        data = json.loads((tmp_path / "b" / "data.json").read_text())
        del data["nodes"][0]["color"]
        (tmp_path / "b" / "data.json").write_text(json.dumps(data))
        report = validate_bundle(tmp_path / "b")
        assert report["ok"] is False
        assert any("schema" in err for err in report["errors"])

    def test_wrong_link_batching_fails(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        data = json.loads((tmp_path / "b" / "data.json").read_text())
        big = next(n for n in data["nodes"] if n["attributes"]["publ_count"] > 1)
        big["attributes"]["pubmed_links"] = [
            {"label": "1-1", "url": "https://x"}, {"label": "2-2", "url": "https://x"}]
        (tmp_path / "b" / "data.json").write_text(json.dumps(data))
        report = validate_bundle(tmp_path / "b")
        assert report["ok"] is False

    def test_missing_parent_discipline_fails(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        data = json.loads((tmp_path / "b" / "data.json").read_text())
        survivors = [n for n in data["nodes"]
                     if n["attributes"]["level"] == "Specialty"
                     or n["id"] != data["nodes"][0]["id"]]
        dropped = data["nodes"][0]["id"]
        data["nodes"] = survivors
        data["edges"] = [e for e in data["edges"]
                         if e["source"] != dropped and e["target"] != dropped]
        (tmp_path / "b" / "data.json").write_text(json.dumps(data))
        report = validate_bundle(tmp_path / "b")
        assert report["ok"] is False
        assert any("parent discipline" in err for err in report["errors"])

    def test_overlay_bundle_passes(self, world, tmp_path):
        overlay = project_subset(world.base_map, set(world.synth.subset), world.membership)
        write_map(overlay, tmp_path / "o")
        report = validate_bundle(tmp_path / "o")
        assert report["ok"] is True, report["errors"]


class TestOverlayDiffersOnlyInDisplayFields:
    def test_xy_and_ids_stable(self, world, tmp_path):
        metric = {p: True for p in world.corpus.publications}
        overlay = color_by_metric(world.base_map, metric, world.membership)
        base_doc = json.loads(serialize_map(world.base_map))
        over_doc = json.loads(serialize_map(overlay))
        for b, o in zip(base_doc["nodes"], over_doc["nodes"]):
            assert b["id"] == o["id"]
            assert b["x"] == o["x"] and b["y"] == o["y"]

    def test_roundtrip_through_disk(self, world, tmp_path):
        write_map(world.base_map, tmp_path / "b")
        loaded = read_map(tmp_path / "b" / "data.json")
        text1 = (tmp_path / "b" / "data.json").read_text()
        assert serialize_map(loaded) == text1

"""Pipeline configuration: one JSON file drives every stage.

All defaults are the stock parameter values (topic resolution 1e-4, minimum
sizes 50/500, label fields and alphas per level, the two layout presets,
sibling factor 3, child expansion 0.5). Flags on the CLI override keys
one-for-one. The configuration hash covers everything that can change an
output byte; the thread count is excluded on purpose so runs with different
parallelism stay comparable.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .labeler import LabelConfig
from .layout import (
    DEFAULT_CHILD_EXPANSION,
    DEFAULT_SIBLING_FACTOR,
    PRESETS,
    LayoutParams,
)
from .leiden import LevelSpec, default_level_specs
from .mapbuild import DEFAULT_PUBMED_URL, DEFAULT_TOP_K_EDGES


class ConfigError(Exception):
    pass


@dataclass
class OverlayJob:
    name: str
    mode: str                      # subset_size | metric_color | cited_by
    subset: str | None = None      # path to subset.txt
    metric: str | None = None      # path to metric.tsv, or "oa_status"
    year_max: int | None = None
    include_unknown: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("subset_size", "metric_color", "cited_by"):
            raise ConfigError(f"overlay {self.name!r}: unknown mode {self.mode!r}")
        if self.mode == "subset_size" and not self.subset:
            raise ConfigError(f"overlay {self.name!r}: subset_size needs 'subset'")
        if self.mode == "cited_by" and not self.subset:
            raise ConfigError(f"overlay {self.name!r}: cited_by needs 'subset'")
        if self.mode == "metric_color" and not self.metric:
            raise ConfigError(f"overlay {self.name!r}: metric_color needs 'metric'")


@dataclass
class PipelineConfig:
    publications: str
    citations: str
    output_dir: str
    year_min: int = 1995
    year_max: int | None = None
    strict_parse: bool = False
    levels: list[LevelSpec] = field(default_factory=default_level_specs)
    leiden_iterations: int = 100
    label: LabelConfig = field(default_factory=LabelConfig)
    stoplist: str | None = None
    pretagged: str | None = None
    layout_presets: dict[str, LayoutParams] = field(
        default_factory=lambda: dict(PRESETS))
    sibling_factor: float = DEFAULT_SIBLING_FACTOR
    child_expansion: float = DEFAULT_CHILD_EXPANSION
    hyperlink_base_url: str = DEFAULT_PUBMED_URL
    top_k_edges: int = DEFAULT_TOP_K_EDGES
    color_saturation: float = 0.65
    color_lightness: float = 0.45
    title: str = "Map of science"
    description: str = ""
    seed: int = 0
    threads: int = 1
    overlays: list[OverlayJob] = field(default_factory=list)

    REQUIRED = ("publications", "citations", "output_dir")

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        obj = dict(obj)
        for key in cls.REQUIRED:
            if key not in obj:
                raise ConfigError(f"missing required config key: {key}")

        if "levels" in obj:
            obj["levels"] = [LevelSpec(**lvl) for lvl in obj["levels"]]
        if "label" in obj:
            obj["label"] = LabelConfig(**obj["label"])
        if "layout_presets" in obj:
            presets = dict(PRESETS)
            for name, params in obj["layout_presets"].items():
                if name not in presets:
                    raise ConfigError(f"unknown layout preset {name!r}")
                presets[name] = dataclasses.replace(presets[name], **params)
            obj["layout_presets"] = presets
        if "overlays" in obj:
            obj["overlays"] = [OverlayJob(**job) for job in obj["overlays"]]

        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            obj = json.loads(path.read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        cfg = cls.from_dict(obj)
        # resolve relative input paths against the config file's directory
        base = path.parent
        for attr in ("publications", "citations", "output_dir", "stoplist", "pretagged"):
            value = getattr(cfg, attr)
            if value and not Path(value).is_absolute():
                setattr(cfg, attr, str((base / value).resolve()))
        for job in cfg.overlays:
            for attr in ("subset", "metric"):
                value = getattr(job, attr)
                if value and value != "oa_status" and not Path(value).is_absolute():
                    setattr(job, attr, str((base / value).resolve()))
        return cfg

    def canonical_dict(self) -> dict:
        """The semantic parameters that shape outputs.

        Thread count is excluded (it must not change any byte) and so are
        filesystem paths, so a relocated workspace keeps its checkpoints.
        """
        out = dataclasses.asdict(self)
        for key in ("threads", "publications", "citations", "output_dir",
                    "stoplist", "pretagged", "overlays"):
            out.pop(key)
        return out

    def config_hash(self) -> str:
        encoded = json.dumps(self.canonical_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(encoded.encode("utf-8")).hexdigest()[:16]

    def year_filter(self) -> tuple[int, int]:
        from datetime import date

        year_max = self.year_max if self.year_max is not None else date.today().year
        return (self.year_min, year_max)

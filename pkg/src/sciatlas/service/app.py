"""FastAPI service: run pipeline stages, serve bundles, project overlays.

The service roots at a workspace directory. Any subdirectory holding a
data.json / config.json / index.html triple is a bundle; bundles are listed
and served by their workspace-relative path. When a bundle carries no
viewer assets of its own, the service falls back to the configured viewer
build so one viewer serves every map.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse

from .. import __version__, export, pipeline
from ..config import ConfigError, OverlayJob, PipelineConfig
from .models import (
    HealthResponse,
    MapListResponse,
    MapSummary,
    OverlayRequest,
    OverlayResponse,
    PipelineRunRequest,
    StageReportResponse,
    ValidationResponse,
)

_MEDIA_TYPES = {
    ".json": "application/json",
    ".html": "text/html",
    ".js": "text/javascript",
    ".css": "text/css",
    ".map": "application/json",
}


def _discover_bundles(workspace: Path) -> list[Path]:
    found = []
    for data in sorted(workspace.rglob("data.json")):
        bundle = data.parent
        if (bundle / "config.json").is_file() and (bundle / "index.html").is_file():
            found.append(bundle)
    return found


def create_app(workspace: str | Path, viewer_assets: str | Path | None = None) -> FastAPI:
    workspace = Path(workspace).resolve()
    viewer_dir = Path(viewer_assets).resolve() if viewer_assets else None

    app = FastAPI(title="sciatlas", version=__version__)

    def bundle_path(name: str) -> Path:
        bundle = (workspace / name).resolve()
        if workspace not in bundle.parents and bundle != workspace:
            raise HTTPException(status_code=404, detail="no such map")
        if not (bundle / "data.json").is_file():
            raise HTTPException(status_code=404, detail=f"no such map: {name}")
        return bundle

    def load_config(path_str: str) -> PipelineConfig:
        path = (workspace / path_str).resolve()
        if workspace not in path.parents:
            raise HTTPException(status_code=400, detail="config must live in the workspace")
        try:
            return PipelineConfig.from_file(path)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/maps", response_model=MapListResponse)
    def list_maps() -> MapListResponse:
        maps = []
        for bundle in _discover_bundles(workspace):
            try:
                data = json.loads((bundle / "data.json").read_text("utf-8"))
                cfg = json.loads((bundle / "config.json").read_text("utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            maps.append(MapSummary(
                name=bundle.relative_to(workspace).as_posix(),
                kind=data.get("metadata", {}).get("kind", "base"),
                nodes=len(data.get("nodes", [])),
                edges=len(data.get("edges", [])),
                title=cfg.get("title", ""),
            ))
        return MapListResponse(maps=maps)

    @app.get("/maps/{name:path}/validation", response_model=ValidationResponse)
    def validate(name: str) -> ValidationResponse:
        report = export.validate_bundle(bundle_path(name))
        return ValidationResponse(**report)

    @app.get("/maps/{name:path}/assets/{asset:path}")
    def bundle_asset(name: str, asset: str) -> FileResponse:
        bundle = bundle_path(name)
        for root in (bundle / "assets", viewer_dir):
            if root is None:
                continue
            target = (root / asset).resolve()
            if root.resolve() in target.parents and target.is_file():
                return FileResponse(target, media_type=_MEDIA_TYPES.get(target.suffix))
        raise HTTPException(status_code=404, detail=f"no asset {asset}")

    @app.get("/maps/{name:path}/{filename}")
    def bundle_file(name: str, filename: str) -> FileResponse:
        if filename not in export.BUNDLE_FILES:
            raise HTTPException(status_code=404, detail="unknown bundle file")
        bundle = bundle_path(name)
        return FileResponse(bundle / filename,
                            media_type=_MEDIA_TYPES.get(Path(filename).suffix))

    @app.post("/pipeline/run", response_model=StageReportResponse)
    def run_pipeline(request: PipelineRunRequest) -> StageReportResponse:
        config = load_config(request.config_path)
        if request.seed is not None:
            config.seed = request.seed
        reports: list[dict] = []
        try:
            for stage in request.stages:
                result = pipeline.run_stage(
                    config, stage, force=request.force,
                    viewer_assets=str(viewer_dir) if viewer_dir else None)
                reports.extend(result if isinstance(result, list) else [result])
        except pipeline.StageError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return StageReportResponse(reports=reports)

    @app.post("/overlays", response_model=OverlayResponse)
    def make_overlay(request: OverlayRequest) -> OverlayResponse:
        config = load_config(request.config_path)
        subset_path = request.subset_path
        tmp = None
        if request.subset_ids is not None:
            tmp = tempfile.NamedTemporaryFile(
                "w", suffix=".txt", delete=False, encoding="utf-8")
            tmp.write("".join(f"{pid}\n" for pid in request.subset_ids))
            tmp.close()
            subset_path = tmp.name
        try:
            job = OverlayJob(name=request.name, mode=request.mode,
                             subset=subset_path, metric=request.metric_path,
                             year_max=request.year_max)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            report = pipeline.run_overlay(
                config, job, force=request.force,
                viewer_assets=str(viewer_dir) if viewer_dir else None)
        except pipeline.StageError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        finally:
            if tmp is not None:
                Path(tmp.name).unlink(missing_ok=True)
        return OverlayResponse(name=job.name, bundle=report["bundle"],
                               validation=ValidationResponse(**report["validation"]))

    return app
